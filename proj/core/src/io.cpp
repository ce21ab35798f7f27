#include "ranklab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ranklab/errors.hpp"

namespace ranklab {

std::string format_double(double v) {
    char buf[40];
    // shortest representation that parses back exactly
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw invalid_parameter("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out) throw invalid_parameter("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string Table::to_csv() const {
    std::ostringstream os;
    if (!header.empty()) os << "# " << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << format_double(row[i]);
        }
        os << "\n";
    }
    return os.str();
}

void write_table(const std::filesystem::path& path, const Table& t) {
    atomic_write(path, t.to_csv());
}

}  // namespace ranklab
