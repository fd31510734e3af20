#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace willsim {

// Shortest decimal that round-trips, always with '.' as separator.
std::string format_number(double v);
inline std::string format_number(int v) { return std::to_string(v); }
inline std::string format_number(long long v) { return std::to_string(v); }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <typename... Ts>
    void add(const Ts&... values) {
        rows.push_back({cell(values)...});
    }

    std::string str() const;
    void write(const std::string& path) const;

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(const char* s) { return s; }
    template <typename T>
    static std::string cell(const T& v) {
        return format_number(v);
    }
};

}  // namespace willsim
