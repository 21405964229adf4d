#include "fp3d/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fp3d/errors.hpp"

namespace fp3d {

namespace {

std::string color_for(const std::string& name) {
    std::size_t hash = 1469598103934665603ULL;
    for (const char c : name) hash = (hash ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    const int hue = static_cast<int>(hash % 360);
    std::ostringstream ss;
    ss << "hsl(" << hue << ",55%,75%)";
    return ss.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const GeometricPlacement& g) {
    double maxx = 1, maxy = 1;
    int max_layer = 0;
    for (const auto& b : g.boxes) {
        maxx = std::max(maxx, b.x2());
        maxy = std::max(maxy, b.y2());
        max_layer = std::max(max_layer, b.layer);
    }
    const int panels = std::max(g.layers, max_layer + 1);
    const double gap = maxx * 0.06 + 1;
    const double margin = std::max(maxx, maxy) * 0.02 + 1;
    const double width = panels * (maxx + gap) + 2 * margin;
    const double height = maxy + 2 * margin;
    const double font = std::max(maxy / 40.0, 1.0);

    std::ostringstream svg;
    svg << std::setprecision(15);  // coordinates must match the layout JSON exactly
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    for (int layer = 0; layer < panels; ++layer) {
        const double tx = margin + layer * (maxx + gap);
        // flip y so the rally corner (0,0) sits bottom-left
        svg << "<g id=\"layer" << layer << "\" transform=\"translate(" << tx << "," << (margin + maxy)
            << ") scale(1,-1)\">\n";
        svg << "  <rect x=\"0\" y=\"0\" width=\"" << maxx << "\" height=\"" << maxy
            << "\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
        for (const auto& b : g.boxes) {
            if (b.layer != layer) continue;
            svg << "  <rect x=\"" << b.x << "\" y=\"" << b.y << "\" width=\"" << b.w
                << "\" height=\"" << b.h << "\" fill=\"" << color_for(b.name)
                << "\" stroke=\"black\" stroke-width=\"" << font / 8 << "\"/>\n";
            svg << "  <text x=\"" << b.x + b.w / 2 << "\" y=\"" << -(b.y + b.h / 2)
                << "\" font-size=\"" << std::min(font, b.w / std::max<double>(b.name.size(), 1) * 1.6)
                << "\" text-anchor=\"middle\" dominant-baseline=\"middle\" transform=\"scale(1,-1)\">"
                << escape(b.name) << "</text>\n";
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace fp3d
