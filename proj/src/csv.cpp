// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/csv.hpp"

#include <charconv>

namespace phflow {

std::string format_number(Scalar value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw IoError("cannot open output file: " + path);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    raw_row(names);
}

void CsvWriter::row(const std::vector<Scalar>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format_number(values[i]);
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed: " + path_);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed: " + path_);
}

}  // namespace phflow
