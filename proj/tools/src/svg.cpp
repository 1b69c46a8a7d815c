#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "app.hpp"

namespace diamondbc::app {

namespace {

constexpr double kWidth = 960, kHeight = 600;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 70;

// series colour follows this tag order
const std::vector<std::pair<std::string, std::string>> kPalette{
    {"df", "#1f77b4"},     {"af", "#ff7f0e"}, {"daf", "#2ca02c"},  {"cf", "#d62728"},
    {"cutset", "#7f7f7f"}, {"rc", "#9467bd"}, {"dfub", "#8c564b"},
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string render_svg(const std::vector<Row>& rows) {
    // one series per scheme tag (and source power when several are swept)
    std::map<double, int> ps_seen;
    for (const auto& r : rows) ps_seen[r.job.ps_db] = 0;
    struct Series {
        std::string name;
        std::string color;
        int order;
        std::vector<std::pair<double, double>> pts;
    };
    std::map<std::string, Series> series;
    double xmin = 1e300, xmax = -1e300, ymax = 0.0;
    for (const auto& r : rows) {
        if (r.failed) continue;
        std::string name = r.job.scheme;
        if (ps_seen.size() > 1) name += " (Ps " + label(r.job.ps_db) + " dB)";
        auto it = series.find(name);
        if (it == series.end()) {
            int order = static_cast<int>(kPalette.size());
            std::string color = "#000000";
            for (std::size_t i = 0; i < kPalette.size(); ++i)
                if (kPalette[i].first == r.job.scheme) {
                    order = static_cast<int>(i);
                    color = kPalette[i].second;
                }
            it = series.emplace(name, Series{name, color, order, {}}).first;
        }
        it->second.pts.emplace_back(r.job.pr_db, r.value);
        xmin = std::min(xmin, r.job.pr_db);
        xmax = std::max(xmax, r.job.pr_db);
        ymax = std::max(ymax, r.value);
    }
    if (series.empty()) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    ymax = ymax > 0.0 ? ymax * 1.05 : 1.0;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto X = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return kTop + ph - y / ymax * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"600\" viewBox=\"0 0 960 600\">\n";
    os << "<rect width=\"960\" height=\"600\" fill=\"white\"/>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
       << num(kTop + ph) << "\"/>\n";
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
       << num(kTop + ph) << "\"/>\n</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i <= 6; ++i) {
        const double x = xmin + (xmax - xmin) * i / 6.0;
        os << "<text x=\"" << num(X(x)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">" << label(x)
           << "</text>\n";
        const double y = ymax * i / 6.0;
        os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(Y(y) + 4) << "\" text-anchor=\"end\">"
           << label(std::round(y * 1000.0) / 1000.0) << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 20)
       << "\" text-anchor=\"middle\">P_r (dB)</text>\n";
    os << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
       << num(kTop + ph / 2) << ")\">rate (nats)</text>\n</g>\n";

    std::vector<const Series*> ordered;
    for (const auto& [_, s] : series) ordered.push_back(&s);
    std::stable_sort(ordered.begin(), ordered.end(), [](auto a, auto b) { return a->order < b->order; });
    int slot = 0;
    for (const Series* s : ordered) {
        auto pts = s->pts;
        std::sort(pts.begin(), pts.end());
        os << "<polyline fill=\"none\" stroke=\"" << s->color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << (i ? " " : "") << num(X(pts[i].first)) << "," << num(Y(pts[i].second));
        os << "\"/>\n";
        const double ly = kTop + 10 + 20 * slot++;
        os << "<line x1=\"" << num(kLeft + pw + 15) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw + 40)
           << "\" y2=\"" << num(ly) << "\" stroke=\"" << s->color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << num(kLeft + pw + 46) << "\" y=\"" << num(ly + 4)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << s->name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace diamondbc::app
