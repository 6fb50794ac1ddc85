#pragma once

// CSV output: one comment line carrying the resolved configuration, a header
// row, then data rows at 17 significant digits with '.' decimal point and
// '\n' line endings, so repeated runs of the same build are byte-identical.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace blochtherm {

class CsvFile {
  public:
    CsvFile(const std::filesystem::path& path, const std::string& comment,
            const std::vector<std::string>& columns)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
        if (!comment.empty()) out_ << "# " << comment << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
        out_ << "\n";
    }

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

  private:
    std::ofstream out_;
};

}  // namespace blochtherm
