#pragma once

#include <string>
#include <vector>

namespace idsctl {

struct CsvTable {
    std::string config_hash;  // from a leading "# config_hash=" line, if any
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text);

struct PlotInput {
    std::string label;
    CsvTable table;
};

// Line chart of `y_column` against the first column, one curve per distinct
// value of a "scale" column. Deterministic in its inputs.
std::string render_svg(const std::vector<PlotInput>& inputs, const std::string& y_column = "value");

}  // namespace idsctl
