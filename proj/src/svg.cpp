#include "corridor/svg.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "corridor/errors.hpp"

namespace corridor {

namespace {

constexpr int kPad = 20;
constexpr int kTimeScale = 40;   // px per headway
constexpr int kLocScale = 400;   // px for the whole corridor

// Fixed two-decimal rendering, rounded half up, computed in exact arithmetic so the
// output never depends on floating-point state.
std::string px(const Rational& v) {
    BigInt cents = rational_floor(v * 100 + Rational(1, 2));
    const bool neg = cents < 0;
    if (neg) cents = -cents;
    const BigInt ip = cents / 100;
    const BigInt fp = cents % 100;
    std::string out = neg ? "-" : "";
    out += ip.str();
    out += ".";
    if (fp < 10) out += "0";
    out += fp.str();
    return out;
}

}  // namespace

std::string render_diagram(const Instance& inst, const Solution* sol) {
    const Timetable& tt = inst.tt;
    if (tt.mode != CrossingMode::Geometric)
        throw model_error("diagram rendering needs a geometric timetable");
    for (const Job& j : inst.jobs)
        if (!j.has_geometry)
            throw model_error("diagram rendering needs geometric jobs (job " +
                              std::to_string(j.id) + " has none)");

    Rational tmax = tt.m * tt.headway + tt.travel;
    for (const Job& j : inst.jobs) tmax = std::max(tmax, j.deadline);
    const Rational time_px = Rational(kTimeScale) / tt.headway;
    const Rational loc_px = Rational(kLocScale) / tt.length;
    auto X = [&](const Rational& t) { return Rational(kPad) + t * time_px; };
    auto Y = [&](const Rational& loc) {
        return Rational(kPad) + Rational(kLocScale) - loc * loc_px;
    };
    const Rational width = X(tmax) + kPad;
    const Rational height = Rational(2 * kPad + kLocScale);

    std::set<std::pair<int, int>> cancelled;  // (dir, index)
    if (sol)
        for (const PathId& p : sol->cancelled)
            cancelled.insert({static_cast<int>(p.dir), p.index});

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << px(width)
       << "\" height=\"" << px(height) << "\" viewBox=\"0 0 " << px(width) << " " << px(height)
       << "\">\n";
    os << "<rect x=\"" << px(Rational(kPad)) << "\" y=\"" << px(Rational(kPad)) << "\" width=\""
       << px(width - 2 * kPad) << "\" height=\"" << px(Rational(kLocScale))
       << "\" fill=\"#ffffff\" stroke=\"#cccccc\"/>\n";

    // Train paths.
    for (int dir = 0; dir < 2; ++dir) {
        const Direction d = dir == 0 ? Direction::Up : Direction::Down;
        if (!tt.uses(d)) continue;
        for (int i = 1; i <= tt.m; ++i) {
            const Rational t0 = i * tt.headway;
            const Rational t1 = t0 + tt.travel;
            const Rational y0 = d == Direction::Up ? Rational(0) : tt.length;
            const Rational y1 = d == Direction::Up ? tt.length : Rational(0);
            const bool cut = cancelled.count({dir, i}) > 0;
            const char* stroke = cut ? "#d62728" : (d == Direction::Up ? "#1f77b4" : "#2ca02c");
            os << "<line class=\"path " << (d == Direction::Up ? "up" : "down")
               << (cut ? " cancelled" : "") << "\" x1=\"" << px(X(t0)) << "\" y1=\""
               << px(Y(y0)) << "\" x2=\"" << px(X(t1)) << "\" y2=\"" << px(Y(y1))
               << "\" stroke=\"" << stroke << "\" stroke-width=\"" << (cut ? "2.5" : "1.2")
               << "\"/>\n";
        }
    }

    // Job windows (dotted) and chosen possessions (filled).
    for (const Job& j : inst.jobs) {
        const Rational x0 = X(j.release);
        const Rational x1 = X(j.deadline);
        Rational ytop = Y(j.band_hi);
        Rational ybot = Y(j.band_lo);
        if (ybot - ytop < 2) {  // keep point bands visible
            const Rational grow = (2 - (ybot - ytop)) / 2;
            ytop -= grow;
            ybot += grow;
        }
        os << "<rect class=\"job\" x=\"" << px(x0) << "\" y=\"" << px(ytop) << "\" width=\""
           << px(x1 - x0) << "\" height=\"" << px(ybot - ytop)
           << "\" fill=\"none\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";
        if (sol) {
            const auto st = sol->starts.find(j.id);
            if (st != sol->starts.end()) {
                const Rational s0 = X(st->second);
                const Rational s1 = X(st->second + j.processing);
                os << "<rect class=\"possession\" x=\"" << px(s0) << "\" y=\"" << px(ytop)
                   << "\" width=\"" << px(s1 - s0) << "\" height=\"" << px(ybot - ytop)
                   << "\" fill=\"#d62728\" fill-opacity=\"0.25\" stroke=\"#d62728\"/>\n";
            }
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace corridor
