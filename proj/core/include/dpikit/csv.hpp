#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dpikit {

// Minimal RFC-4180-style CSV: fields containing comma, quote, CR or LF are
// quoted, embedded quotes doubled. Records are single-line (the formats this
// toolkit defines never embed newlines).
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split(const std::string& line, size_t line_no);

struct CsvFile {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // Maps header names to column indexes; throws FormatError when a required
    // column is missing or the file has columns outside `expected`.
    std::vector<size_t> column_map(const std::vector<std::string>& expected) const;
};

CsvFile read_csv(const std::filesystem::path& path);

// Writes content to a temp sibling, then renames, so failures never leave a
// partial file at `path`.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// FNV-1a 64-bit digest, hex-encoded; used to fingerprint files in reports.
std::string fnv1a64_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

} // namespace dpikit
