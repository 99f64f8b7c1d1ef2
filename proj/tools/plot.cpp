#include "plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "ids/errors.hpp"

namespace idsctl {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

double parse_number(const std::string& s) {
    double x = std::numeric_limits<double>::quiet_NaN();
    std::from_chars(s.data(), s.data() + s.size(), x);
    return x;
}

std::string fixed(double x, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << x;
    return os.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Curve {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string tag = "# config_hash=";
            if (line.rfind(tag, 0) == 0) t.config_hash = line.substr(tag.size());
            continue;
        }
        if (t.header.empty()) {
            t.header = split(line);
        } else {
            t.rows.push_back(split(line));
        }
    }
    if (t.header.size() < 2) throw ids::ConfigError("plot input needs at least two CSV columns");
    return t;
}

std::string render_svg(const std::vector<PlotInput>& inputs, const std::string& y_column) {
    std::vector<Curve> curves;
    std::vector<std::string> hashes;
    for (const PlotInput& in : inputs) {
        const auto& h = in.table.header;
        auto find = [&](const std::string& name) {
            auto it = std::find(h.begin(), h.end(), name);
            return it == h.end() ? std::string::npos : static_cast<std::size_t>(it - h.begin());
        };
        std::size_t y = find(y_column);
        if (y == std::string::npos) y = 1;
        const std::size_t scale = find("scale");
        std::map<std::string, std::size_t> by_scale;
        for (const auto& row : in.table.rows) {
            if (row.size() <= std::max(y, scale == std::string::npos ? 0 : scale)) continue;
            const std::string key = scale == std::string::npos ? "" : row[scale];
            auto [it, fresh] = by_scale.try_emplace(key, curves.size());
            if (fresh) curves.push_back({in.label + (key.empty() ? "" : " scale=" + key), {}});
            const double px = parse_number(row[0]), py = parse_number(row[y]);
            if (std::isfinite(px) && std::isfinite(py)) curves[it->second].points.emplace_back(px, py);
        }
        if (!in.table.config_hash.empty()) hashes.push_back(in.table.config_hash);
    }

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Curve& c : curves) {
        for (auto [x, y] : c.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (!(x0 < x1)) {
        x0 = std::isfinite(x0) ? x0 - 1 : 0;
        x1 = x0 + 2;
    }
    if (!(y0 < y1)) {
        y0 = std::isfinite(y0) ? y0 - 1 : 0;
        y1 = y0 + 2;
    }

    const double width = 720, height = 440, left = 70, right = 200, top = 20, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
    static const char* palette[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#66327c", "#00798c", "#30343f"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    for (const auto& h : hashes) os << "<!-- config_hash=" << h << " -->\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = x0 + (x1 - x0) * k / 4, y = y0 + (y1 - y0) * k / 4;
        os << "<text x=\"" << fixed(sx(x), 1) << "\" y=\"" << fixed(top + ph + 18, 1)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << fixed(x, 3) << "</text>\n";
        os << "<text x=\"" << fixed(left - 6, 1) << "\" y=\"" << fixed(sy(y) + 4, 1)
           << "\" font-size=\"11\" text-anchor=\"end\">" << fixed(y, 3) << "</text>\n";
    }
    const std::string xname = inputs.empty() ? "x" : inputs.front().table.header.front();
    os << "<text x=\"" << fixed(left + pw / 2, 1) << "\" y=\"" << fixed(height - 10, 1)
       << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(xname) << "</text>\n";
    os << "<text x=\"16\" y=\"" << fixed(top + ph / 2, 1) << "\" font-size=\"13\" transform=\"rotate(-90 16 "
       << fixed(top + ph / 2, 1) << ")\" text-anchor=\"middle\">" << escape(y_column) << "</text>\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const char* colour = palette[i % std::size(palette)];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : curves[i].points) os << fixed(sx(x), 2) << ',' << fixed(sy(y), 2) << ' ';
        os << "\"/>\n";
        const double ly = top + 14 + 18 * static_cast<double>(i);
        os << "<line x1=\"" << fixed(left + pw + 12, 1) << "\" y1=\"" << fixed(ly - 4, 1) << "\" x2=\""
           << fixed(left + pw + 36, 1) << "\" y2=\"" << fixed(ly - 4, 1) << "\" stroke=\"" << colour
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fixed(left + pw + 42, 1) << "\" y=\"" << fixed(ly, 1) << "\" font-size=\"11\">"
           << escape(curves[i].label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace idsctl
