#pragma once

#include <string>
#include <vector>

namespace ionsim::io {

// Locale-independent float formatting: '.' decimal separator, 12 significant
// digits. All emitted numbers go through here so repeated runs are
// byte-identical.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    std::string to_string() const;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ionsim::io
