#include "dpikit/csv.hpp"

#include "dpikit/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dpikit {

std::string csv_escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> csv_split(const std::string& line, size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
        ++i;
    }
    if (in_quotes) throw FormatError("unterminated quoted field", line_no);
    fields.push_back(std::move(current));
    return fields;
}

std::vector<size_t> CsvFile::column_map(const std::vector<std::string>& expected) const {
    if (header.size() != expected.size()) {
        throw FormatError("expected " + std::to_string(expected.size()) + " columns, found " +
                              std::to_string(header.size()),
                          1);
    }
    std::vector<size_t> map;
    map.reserve(expected.size());
    for (const std::string& name : expected) {
        bool found = false;
        for (size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                map.push_back(i);
                found = true;
                break;
            }
        }
        if (!found) throw FormatError("missing column: " + name, 1);
    }
    return map;
}

CsvFile read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path.string());

    CsvFile file;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = csv_split(line, line_no);
        if (line_no == 1) {
            file.header = std::move(fields);
        } else {
            file.rows.push_back(std::move(fields));
        }
    }
    if (file.header.empty()) throw FormatError("empty file: " + path.string(), 1);
    return file;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("failed writing: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a64_hex(std::string_view bytes) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::filesystem::path& path) {
    return fnv1a64_hex(read_file(path));
}

} // namespace dpikit
