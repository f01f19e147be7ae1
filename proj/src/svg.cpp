#include "topicdrift/svg.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "topicdrift/errors.hpp"
#include "topicdrift/io.hpp"

namespace topicdrift {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 60.0;

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string term_slug(const std::string& term) {
    std::string slug;
    for (unsigned char c : term) {
        if (std::isalnum(c)) {
            slug += static_cast<char>(std::tolower(c));
        } else if (c == ' ') {
            slug += '_';
        } else {
            slug += '-';
        }
    }
    return slug.empty() ? "term" : slug;
}

void write_diffusion_chart(const std::filesystem::path& path, const std::string& term,
                           const std::vector<std::string>& pair_labels,
                           const std::vector<double>& scores, double threshold) {
    if (scores.empty() || scores.size() != pair_labels.size()) {
        throw DataError("diffusion chart: scores and labels must be non-empty and aligned");
    }

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    double y_max = std::max(threshold, *std::max_element(scores.begin(), scores.end()));
    y_max = std::max(y_max * 1.1, 0.1);

    auto x_at = [&](std::size_t i) {
        if (scores.size() == 1) return kMarginLeft + plot_w / 2.0;
        return kMarginLeft + plot_w * static_cast<double>(i) / static_cast<double>(scores.size() - 1);
    };
    auto y_at = [&](double v) { return kMarginTop + plot_h * (1.0 - v / y_max); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
        << "  <text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape_xml(term) << "</text>\n";

    // axes
    svg << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n"
        << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = y_max * tick / 4.0;
        svg << "  <text x=\"" << kMarginLeft - 8 << "\" y=\"" << y_at(v) + 4
            << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    for (std::size_t i = 0; i < pair_labels.size(); ++i) {
        svg << "  <text x=\"" << x_at(i) << "\" y=\"" << kMarginTop + plot_h + 18
            << "\" text-anchor=\"middle\">" << escape_xml(pair_labels[i]) << "</text>\n";
    }

    // threshold rule
    svg << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << y_at(threshold) << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << y_at(threshold)
        << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n"
        << "  <text x=\"" << kMarginLeft + plot_w << "\" y=\"" << y_at(threshold) - 5
        << "\" text-anchor=\"end\" fill=\"red\">threshold " << fmt(threshold) << "</text>\n";

    // score polyline + markers
    svg << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i) svg << ' ';
        svg << x_at(i) << ',' << y_at(scores[i]);
    }
    svg << "\"/>\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        svg << "  <circle cx=\"" << x_at(i) << "\" cy=\"" << y_at(scores[i])
            << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    svg << "</svg>\n";
    write_file_atomic(path, svg.str());
}

}  // namespace topicdrift
