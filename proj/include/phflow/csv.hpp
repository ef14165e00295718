// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_CSV_HPP
#define PHFLOW_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

#include "phflow/types.hpp"

namespace phflow {

/// Shortest decimal string that round-trips the value exactly; period decimal
/// separator regardless of locale.
std::string format_number(Scalar value);

/// Header row plus numeric rows with a fixed column order.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void header(const std::vector<std::string>& names);
    void row(const std::vector<Scalar>& values);
    void raw_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace phflow

#endif  // PHFLOW_CSV_HPP
