#include "willsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "willsim/core.hpp"

namespace willsim {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // also folds -0
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

std::string CsvTable::str() const {
    std::string out;
    const auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
    f << str();
}

}  // namespace willsim
