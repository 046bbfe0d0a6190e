#pragma once

// CSV and configuration file handling for the command-line tool.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "thorin/laguerre/samples.hpp"

namespace thorin::cli {

/// Comma-separated numeric rows with '.' decimals. A first row holding any
/// non-numeric cell is taken as a header. Throws DataError naming the line and
/// column of the first empty, non-numeric, negative or non-finite cell, or of
/// a row whose width differs from the first.
laguerre::SampleMatrix read_csv(std::istream& in, const std::string& source = "input");
laguerre::SampleMatrix read_csv_file(const std::string& path);

/// Header x1,...,xd then one row per sample, shortest round-trip decimals.
void write_csv(std::ostream& out, const laguerre::SampleMatrix& samples);

/// Numbers printed with the shortest representation that round-trips.
std::string format_double(double v);

/// Settings from a JSON object or from key=value lines ('#' starts a
/// comment). Values keep their textual form; JSON arrays become
/// comma-separated lists. Throws ConfigError on malformed input.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace thorin::cli
