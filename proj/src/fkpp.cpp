#include "brbm/fkpp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "brbm/errors.hpp"
#include "brbm/stochastic.hpp"

namespace brbm {

namespace {

constexpr double kEdgeTolerance = 0.1;
constexpr double kEdgeProbeDistance = 1.0;

std::size_t checked_multiple(double span, double step, const char* what) {
    const double ratio = span / step;
    const double r = std::round(ratio);
    if (std::abs(ratio - r) > 1e-8 * std::max(1.0, ratio))
        throw std::invalid_argument(std::string(what) + " is not an integer multiple of the step");
    return static_cast<std::size_t>(r);
}

// Implicit diffusion (I - dt/2 D_xx) with a Dirichlet row at the far edge and
// either a Dirichlet row or a ghost-node Neumann row at the near edge.
// Pre-factorised Thomas solve; the system stays an M-matrix so nonnegative
// right-hand sides give nonnegative solutions.
class DiffusionSolver {
public:
    DiffusionSolver(std::size_t n, double r, bool neumann_left) : n_(n), cprime_(n), denom_(n) {
        // Row i: sub[i] w_{i-1} + diag[i] w_i + sup[i] w_{i+1}
        sub_.assign(n, -r);
        diag_.assign(n, 1.0 + 2.0 * r);
        sup_.assign(n, -r);
        if (neumann_left) {
            sup_[0] = -2.0 * r;
        } else {
            diag_[0] = 1.0;
            sup_[0] = 0.0;
        }
        diag_[n - 1] = 1.0;
        sub_[n - 1] = 0.0;
        denom_[0] = diag_[0];
        cprime_[0] = sup_[0] / denom_[0];
        for (std::size_t i = 1; i < n; ++i) {
            denom_[i] = diag_[i] - sub_[i] * cprime_[i - 1];
            cprime_[i] = sup_[i] / denom_[i];
        }
    }

    void solve(std::vector<double>& rhs) const {
        rhs[0] /= denom_[0];
        for (std::size_t i = 1; i < n_; ++i) rhs[i] = (rhs[i] - sub_[i] * rhs[i - 1]) / denom_[i];
        for (std::size_t i = n_ - 1; i-- > 0;) rhs[i] -= cprime_[i] * rhs[i + 1];
    }

private:
    std::size_t n_;
    std::vector<double> sub_, diag_, sup_, cprime_, denom_;
};

FieldState make_state(double t, const Grid1D& g, const std::vector<double>& w, Variant v, double x_shift) {
    FieldState s;
    s.time = t;
    s.lo = g.lo();
    s.dx = g.dx();
    s.variant = v;
    s.x_shift = x_shift;
    s.values.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) s.values[i] = 1.0 - w[i];
    return s;
}

// Works on w = 1 - u, which satisfies the KPP equation w_t = w_xx/2 + w - w^2.
// The invaded state w = 0 is then represented exactly, so rounding noise
// cannot seed a spurious front ahead of the real one.
FieldHistory run(const Grid1D& grid, std::vector<double> u0, Variant variant, double x_shift, double store_interval) {
    if (u0.size() != grid.nodes()) throw std::invalid_argument("initial data size does not match the grid");
    if (grid.nodes() < 3) throw std::invalid_argument("grid needs at least 3 nodes");
    if (!(store_interval > 0.0)) throw std::invalid_argument("store_interval must be positive");
    const std::size_t store_every = checked_multiple(store_interval, grid.dt(), "store_interval");
    if (store_every == 0) throw std::invalid_argument("store_interval shorter than dt");

    const bool neumann = variant == Variant::HalfLine;
    const std::size_t n = grid.nodes();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 - u0[i];
    const double w_lo = w.front();
    const double w_hi = w.back();

    FieldHistory hist;
    hist.variant = variant;
    hist.x_shift = x_shift;
    hist.store_interval = store_interval;
    hist.lo_edge_value = u0.front();
    hist.hi_edge_value = u0.back();
    hist.states.push_back(make_state(0.0, grid, w, variant, x_shift));

    // Next to a pinned edge the solution always sits near the pinned value, so
    // the front is detected one length unit inside instead.
    const std::size_t probe = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(std::llround(kEdgeProbeDistance / grid.dx())), n / 4));
    const double dt = grid.dt();
    const DiffusionSolver diffusion(n, 0.5 * dt / (grid.dx() * grid.dx()), neumann);

    for (std::size_t step = 1; step <= grid.steps(); ++step) {
        for (double& v : w) v += dt * (v - v * v);
        if (!neumann) w.front() = w_lo;
        w.back() = w_hi;
        diffusion.solve(w);

        if (step % store_every == 0 || step == grid.steps()) {
            const double t = static_cast<double>(step) * dt;
            if ((!neumann && std::abs(w[probe] - w_lo) > kEdgeTolerance) ||
                std::abs(w[n - 1 - probe] - w_hi) > kEdgeTolerance)
                throw NumericalError("fkpp: front reached the domain edge at t = " + std::to_string(t));
            if (step % store_every == 0) hist.states.push_back(make_state(t, grid, w, variant, x_shift));
        }
    }
    return hist;
}

double lerp_at(std::span<const double> xs, std::span<const double> ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double f = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + f * (ys[i + 1] - ys[i]);
}

}  // namespace

Grid1D::Grid1D(double lo, double hi, double dx, double dt, double final_time)
    : lo_(lo), dx_(dx), dt_(dt), T_(final_time) {
    if (!(hi > lo)) throw std::invalid_argument("Grid1D: requires hi > lo");
    if (!(dx > 0.0)) throw std::invalid_argument("Grid1D: requires dx > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("Grid1D: requires dt > 0");
    if (dt > 1.0) throw std::invalid_argument("Grid1D: dt > 1 breaks range preservation of the explicit reaction step");
    if (final_time < 0.0) throw std::invalid_argument("Grid1D: negative final time");
    nodes_ = static_cast<std::size_t>(std::ceil((hi - lo) / dx - 1e-9)) + 1;
    steps_ = checked_multiple(final_time, dt, "final time");
}

double FieldState::value_at(double pos) const {
    const double hi = position(values.size() - 1);
    if (pos < lo - 1e-12 || pos > hi + 1e-12) throw std::domain_error("FieldState: position outside the grid");
    const double f = std::clamp((pos - lo) / dx, 0.0, static_cast<double>(values.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(f), values.size() - 2);
    const double frac = f - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

const FieldState& FieldHistory::at(double t) const {
    if (states.empty()) throw std::domain_error("FieldHistory: empty");
    const double k = t / store_interval;
    const double r = std::round(k);
    if (t < -1e-12 || std::abs(k - r) > 1e-6 || r >= static_cast<double>(states.size()))
        throw std::domain_error("FieldHistory: time " + std::to_string(t) + " not stored");
    return states[static_cast<std::size_t>(r)];
}

std::vector<double> heaviside(const Grid1D& grid, double x0) {
    std::vector<double> u(grid.nodes());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = grid.x(i) >= x0 - 1e-12 * grid.dx() ? 1.0 : 0.0;
    return u;
}

FieldHistory solve_fkpp_line(const Grid1D& grid, double store_interval) {
    return solve_fkpp_line(grid, store_interval, heaviside(grid, 0.0));
}

FieldHistory solve_fkpp_line(const Grid1D& grid, double store_interval, std::vector<double> initial) {
    return run(grid, std::move(initial), Variant::Line, 0.0, store_interval);
}

FieldHistory solve_fkpp_halfline(const Grid1D& grid, double x_shift, double store_interval) {
    if (grid.lo() != 0.0) throw std::invalid_argument("solve_fkpp_halfline: grid must start at 0");
    if (x_shift < 0.0) throw std::invalid_argument("solve_fkpp_halfline: x_shift must be nonnegative");
    std::vector<double> u0(grid.nodes());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = grid.x(i) <= x_shift + 1e-12 * grid.dx() ? 1.0 : 0.0;
    return run(grid, std::move(u0), Variant::HalfLine, x_shift, store_interval);
}

double front_position(const FieldState& field, double level) {
    const auto& u = field.values;
    if (u.size() < 2) throw std::domain_error("front_position: field too small");
    const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
    if (!(*mn < level && level < *mx)) throw std::domain_error("front_position: level not bracketed");
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double a = u[i] - level;
        const double b = u[i + 1] - level;
        if (a == 0.0) return field.position(i);
        if ((a < 0.0) != (b < 0.0) || b == 0.0) return field.position(i) + a / (a - b) * field.dx;
    }
    throw std::domain_error("front_position: level not bracketed");
}

double renewal_residual(const FieldHistory& history, std::span<const RenewalPoint> points) {
    if (history.variant != Variant::HalfLine) throw std::domain_error("renewal_residual: needs a half-line history");
    const double x = history.x_shift;
    const double h = history.store_interval;
    const double edge2 = history.hi_edge_value * history.hi_edge_value;
    double worst = 0.0;

    for (const auto& p : points) {
        if (std::abs(p.x - x) > 1e-9 * std::max(1.0, x))
            throw std::domain_error("renewal_residual: point x differs from the history's x_shift");
        const FieldState& now = history.at(p.t);
        const double lhs = now.value_at(p.y);
        const double y = p.y;

        double rhs;
        if (p.t <= 0.0) {
            rhs = x - y >= 0.0 ? 1.0 : 0.0;
        } else {
            const double sd = std::sqrt(2.0 * p.t);
            rhs = std::exp(-p.t) * 0.5 * (std::erf((x - y) / sd) + std::erf((x + y) / sd));

            const auto K = static_cast<std::size_t>(std::llround(p.t / h));
            std::vector<double> integrand(K + 1);
            integrand[0] = lhs * lhs;
            for (std::size_t k = 1; k <= K; ++k) {
                const double s = static_cast<double>(k) * h;
                const FieldState& past = history.states[K - k];
                const auto& u = past.values;
                // Trapezoid in z over the grid, then the closed-form tail beyond it.
                double inner = 0.0;
                for (std::size_t j = 0; j < u.size(); ++j) {
                    const double wgt = (j == 0 || j + 1 == u.size()) ? 0.5 : 1.0;
                    inner += wgt * reflected_density(0.0, y, s, past.position(j)) * u[j] * u[j];
                }
                inner *= past.dx;
                const double zmax = past.position(u.size() - 1);
                const double ss = std::sqrt(2.0 * s);
                inner += edge2 * 0.5 * (std::erfc((zmax - y) / ss) + std::erfc((zmax + y) / ss));
                integrand[k] = std::exp(-s) * inner;
            }
            // Composite Simpson; a trailing 3/8 panel when K is odd.
            double integral = 0.0;
            std::size_t simpson_end = K;
            if (K == 1) {
                integral = 0.5 * h * (integrand[0] + integrand[1]);
                simpson_end = 0;
            } else if (K % 2 == 1) {
                simpson_end = K - 3;
                integral += 3.0 * h / 8.0 *
                            (integrand[K - 3] + 3.0 * integrand[K - 2] + 3.0 * integrand[K - 1] + integrand[K]);
            }
            for (std::size_t k = 0; k + 2 <= simpson_end; k += 2)
                integral += h / 3.0 * (integrand[k] + 4.0 * integrand[k + 1] + integrand[k + 2]);
            rhs += integral;
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

std::vector<double> ProfileFamily::profile(double t, double y) const {
    std::vector<double> out;
    out.reserve(histories.size());
    for (const auto& h : histories) out.push_back(h.at(t).value_at(y));
    return out;
}

ProfileFamily solve_profile_family(std::span<const double> x_values, double dx, double dt, double final_time,
                                   double store_interval, double margin) {
    ProfileFamily fam;
    fam.x_values.assign(x_values.begin(), x_values.end());
    fam.histories.reserve(x_values.size());
    for (double x : x_values) {
        const Grid1D grid(0.0, x + margin, dx, dt, final_time);
        fam.histories.push_back(solve_fkpp_halfline(grid, x, store_interval));
    }
    return fam;
}

double profile_front(std::span<const double> xs, std::span<const double> values, double delta) {
    if (xs.size() != values.size() || xs.size() < 2) throw std::domain_error("profile_front: bad profile");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double a = values[i] - delta;
        const double b = values[i + 1] - delta;
        if (a <= 0.0 && b > 0.0) return xs[i] + (b == a ? 0.0 : -a / (b - a) * (xs[i + 1] - xs[i]));
    }
    throw std::domain_error("profile_front: level not bracketed");
}

double centered_sup_distance(std::span<const double> xs_a, std::span<const double> a, std::span<const double> xs_b,
                             std::span<const double> b, double delta) {
    const double qa = profile_front(xs_a, a, delta);
    const double qb = profile_front(xs_b, b, delta);
    const double lo = std::max(xs_a.front() - qa, xs_b.front() - qb);
    const double hi = std::min(xs_a.back() - qa, xs_b.back() - qb);
    if (!(hi > lo)) throw std::domain_error("centered_sup_distance: centred profiles do not overlap");
    const double step = std::min(xs_a[1] - xs_a[0], xs_b[1] - xs_b[0]) / 2.0;
    std::vector<double> ca(xs_a.size()), cb(xs_b.size());
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = xs_a[i] - qa;
    for (std::size_t i = 0; i < cb.size(); ++i) cb[i] = xs_b[i] - qb;
    double sup = 0.0;
    for (double xi = lo; xi <= hi + 1e-12; xi += step)
        sup = std::max(sup, std::abs(lerp_at(ca, a, xi) - lerp_at(cb, b, xi)));
    return sup;
}

std::vector<ProfileDistance> profile_convergence(const ProfileFamily& family, std::span<const double> y_origins,
                                                 std::span<const double> times, double delta) {
    if (y_origins.size() < 2) throw std::domain_error("profile_convergence: needs at least two y origins");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("profile_convergence: delta must lie in (0, 1)");
    std::vector<ProfileDistance> out;
    for (double t : times) {
        ProfileDistance d;
        d.time = t;
        try {
            const auto ref = family.profile(t, y_origins[0]);
            for (std::size_t k = 1; k < y_origins.size(); ++k) {
                const auto other = family.profile(t, y_origins[k]);
                d.distance = std::max(d.distance,
                                      centered_sup_distance(family.x_values, ref, family.x_values, other, delta));
            }
        } catch (const std::domain_error&) {
            d.flagged = true;
            d.distance = 0.0;
        }
        out.push_back(d);
    }
    return out;
}

void write_field_records(std::ostream& out, const FieldHistory& history, std::size_t stride) {
    if (stride == 0) stride = 1;
    out << "t,x,u\n";
    const auto old = out.precision(12);
    for (const auto& s : history.states)
        for (std::size_t i = 0; i < s.values.size(); i += stride)
            out << s.time << ',' << s.position(i) << ',' << s.values[i] << '\n';
    out.precision(old);
}

void write_front_records(std::ostream& out, std::span<const double> times, std::span<const double> fronts) {
    out << "t,front\n";
    const auto old = out.precision(12);
    for (std::size_t i = 0; i < times.size() && i < fronts.size(); ++i) out << times[i] << ',' << fronts[i] << '\n';
    out.precision(old);
}

}  // namespace brbm
