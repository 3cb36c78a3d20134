#pragma once

#include <fmt/format.h>

#include <string>
#include <string_view>

#include "unrest/core/error.hpp"
#include "unrest/evaluation/compare.hpp"

namespace unrest::evaluation {

struct RenderedReport {
    std::string csv;
    std::string svg;
};

inline std::string comparison_csv(const ComparisonTable& table) {
    std::string out = "kind,accuracy,mae\n";
    for (const auto& r : table.rows) out += fmt::format("{},{:.4f},{:.4f}\n", to_string(r.kind), r.accuracy, r.mae);
    return out;
}

inline ComparisonTable read_comparison_csv(std::string_view text) {
    ComparisonTable t;
    bool header = true;
    for_each_line(text, [&](std::string_view line) {
        if (header) {
            header = false;
            if (line != "kind,accuracy,mae") throw FormatError("not a comparison CSV");
            return;
        }
        if (line.empty()) return;
        auto cols = split(line, ',');
        ComparisonRow row;
        auto kind = cols.size() == 3 ? models::parse_kind(cols[0]) : std::nullopt;
        if (!kind || !parse_double(cols[1], row.accuracy) || !parse_double(cols[2], row.mae))
            throw FormatError("bad comparison row '" + std::string(line) + "'");
        row.kind = *kind;
        t.rows.push_back(row);
    });
    t.sort();
    return t;
}

/// Horizontal bar chart of accuracy on a fixed 0..1 axis.
inline std::string accuracy_svg(const ComparisonTable& table, std::string_view country) {
    constexpr int label_w = 110, plot_w = 400, bar_h = 24, gap = 8, top = 40, bottom = 36, right = 70;
    const int n = static_cast<int>(table.rows.size());
    const int height = top + n * (bar_h + gap) + bottom;
    const int width = label_w + plot_w + right;
    std::string s;
    s += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)"
                     "\n",
                     width, height, width, height);
    s += fmt::format(R"(<rect width="{}" height="{}" fill="#ffffff"/>)"
                     "\n",
                     width, height);
    s += fmt::format(R"(<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">)"
                     "Accuracy comparison for {}</text>\n",
                     width / 2, country);
    const int axis_y = top + n * (bar_h + gap);
    for (int t = 0; t <= 4; ++t) {
        const double x = label_w + plot_w * t / 4.0;
        s += fmt::format(R"(<line x1="{:.1f}" y1="{}" x2="{:.1f}" y2="{}" stroke="#dddddd"/>)"
                         "\n",
                         x, top - 4, x, axis_y);
        s += fmt::format(R"(<text x="{:.1f}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{:.2f}</text>)"
                         "\n",
                         x, axis_y + 16, t / 4.0);
    }
    s += fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#333333"/>)"
                     "\n",
                     label_w, axis_y, label_w + plot_w, axis_y);
    for (int i = 0; i < n; ++i) {
        const auto& r = table.rows[static_cast<std::size_t>(i)];
        const int y = top + i * (bar_h + gap);
        const double w = plot_w * std::clamp(r.accuracy, 0.0, 1.0);
        const char* fill = r.kind == ModelKind::forest ? "#2b6cb0" : "#90a4ae";
        s += fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>)"
                         "\n",
                         label_w - 8, y + bar_h / 2 + 4, to_string(r.kind));
        s += fmt::format(R"(<rect x="{}" y="{}" width="{:.2f}" height="{}" fill="{}"/>)"
                         "\n",
                         label_w, y, w, bar_h, fill);
        s += fmt::format(R"(<text x="{:.2f}" y="{}" font-family="sans-serif" font-size="11">{:.4f}</text>)"
                         "\n",
                         label_w + w + 4, y + bar_h / 2 + 4, r.accuracy);
    }
    s += fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">accuracy</text>)"
                     "\n",
                     label_w + plot_w / 2, height - 6);
    s += "</svg>\n";
    return s;
}

inline RenderedReport render_report(const ComparisonTable& table, std::string_view country) {
    if (table.rows.empty()) throw EmptyInput("nothing to report");
    ComparisonTable sorted = table;
    sorted.sort();
    return {comparison_csv(sorted), accuracy_svg(sorted, country)};
}

} // namespace unrest::evaluation
