#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace emspec {

// Shortest round-trip decimal representation (via std::to_chars), so repeated
// runs emit byte-identical files.
std::string format_double(double value);

std::string join_csv(const std::vector<std::string>& fields);

// Splits one CSV line on commas. No quoting support: tickers and dates never
// contain commas in the accepted layouts.
std::vector<std::string> split_csv_line(const std::string& line);

// Parses a decimal number, rejecting trailing garbage, NaN and infinities.
// `context` names the cell for the error message.
double parse_double(const std::string& text, const std::string& context);

std::string read_text_file(const std::string& path);

// Writes to `<path>.tmp` then renames, so readers never observe a half file.
void write_file_atomic(const std::string& path, const std::string& content);

// FNV-1a over the file bytes, as a 16-digit hex string. Used by the run
// manifest to fingerprint inputs and outputs.
std::string content_hash_hex(const std::string& bytes);

}  // namespace emspec
