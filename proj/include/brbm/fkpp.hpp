#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace brbm {

/// Uniform grid on [lo, hi] with time step dt up to final time T.
///
/// Stepper contract (semi-implicit: implicit diffusion, explicit reaction):
/// dt <= 1 keeps the explicit reaction update inside [0, 1]; the implicit
/// diffusion is unconditionally stable. Violations throw std::invalid_argument.
class Grid1D {
public:
    Grid1D(double lo, double hi, double dx, double dt, double final_time);

    double lo() const { return lo_; }
    double hi() const { return lo_ + dx_ * static_cast<double>(nodes_ - 1); }
    double dx() const { return dx_; }
    double dt() const { return dt_; }
    double final_time() const { return T_; }
    std::size_t nodes() const { return nodes_; }
    std::size_t steps() const { return steps_; }
    double x(std::size_t i) const { return lo_ + dx_ * static_cast<double>(i); }

private:
    double lo_, dx_, dt_, T_;
    std::size_t nodes_;
    std::size_t steps_;
};

enum class Variant { Line, HalfLine };

/// u on the grid nodes at one time. For the half-line variant the values are
/// y -> u^R(t, x_shift, y).
struct FieldState {
    double time = 0.0;
    double lo = 0.0;
    double dx = 0.0;
    std::vector<double> values;
    Variant variant = Variant::Line;
    double x_shift = 0.0;

    double position(std::size_t i) const { return lo + dx * static_cast<double>(i); }
    /// Linear interpolation; throws std::domain_error outside the grid.
    double value_at(double pos) const;
};

struct FieldHistory {
    Variant variant = Variant::Line;
    double x_shift = 0.0;
    double store_interval = 0.0;
    double lo_edge_value = 0.0;
    double hi_edge_value = 0.0;
    std::vector<FieldState> states;

    /// State stored at time t (must be a multiple of store_interval).
    const FieldState& at(double t) const;
};

/// Node value 1 for x >= x0, else 0, with the jump snapped to the node at or
/// right of x0.
std::vector<double> heaviside(const Grid1D& grid, double x0);

/// F-KPP  u_t = u_xx / 2 + u^2 - u  on [lo, hi] with the edges pinned at the
/// initial edge values (0 and 1 for Heaviside data, the default with x0 = 0).
/// Stores the state every `store_interval`, including t = 0.
/// Throws NumericalError if the solution departs from the pinned value next
/// to either edge.
FieldHistory solve_fkpp_line(const Grid1D& grid, double store_interval);
FieldHistory solve_fkpp_line(const Grid1D& grid, double store_interval, std::vector<double> initial);

/// Same equation in y on [0, hi] with initial data H(x_shift - y), a ghost
/// node Neumann closure at y = 0 and the far edge pinned.
FieldHistory solve_fkpp_halfline(const Grid1D& grid, double x_shift, double store_interval);

/// Linear interpolation of the first crossing of `level`. Throws
/// std::domain_error if the field does not straddle the level.
double front_position(const FieldState& field, double level);

struct RenewalPoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// Max |u^R(t,x,y) - RHS| over the points, where RHS is the first-branching
/// renewal form
///   e^{-t} int p^R(0,y;t,z) H(x-z) dz
///     + int_0^t e^{-s} int p^R(0,y;s,z) u^R(t-s,x,z)^2 dz ds
/// evaluated by quadrature against the stored half-line history. Every
/// point's x must equal the history's x_shift.
double renewal_residual(const FieldHistory& history, std::span<const RenewalPoint> points);

/// Half-line solutions for a family of x values, all sharing dx, dt, T and
/// storage times. Each solve runs on [0, x + margin].
struct ProfileFamily {
    std::vector<double> x_values;
    std::vector<FieldHistory> histories;

    /// x -> u^R(t, x, y) over the family.
    std::vector<double> profile(double t, double y) const;
};

ProfileFamily solve_profile_family(std::span<const double> x_values, double dx, double dt, double final_time,
                                   double store_interval, double margin = 20.0);

/// delta-front of a nondecreasing profile sampled at `xs`: the x where it
/// crosses delta. Throws std::domain_error when not bracketed.
double profile_front(std::span<const double> xs, std::span<const double> values, double delta);

/// Sup distance between two nondecreasing profiles after centring each at
/// its own delta-front, over the overlap of their centred supports.
double centered_sup_distance(std::span<const double> xs_a, std::span<const double> a, std::span<const double> xs_b,
                             std::span<const double> b, double delta);

struct ProfileDistance {
    double time = 0.0;
    double distance = 0.0;
    bool flagged = false;  // a front was not yet formed inside the x range
};

/// For each time, the max over y-origin pairs of the centred sup distance
/// between x -> u^R(t, x + q_delta(y,t), y).
std::vector<ProfileDistance> profile_convergence(const ProfileFamily& family, std::span<const double> y_origins,
                                                 std::span<const double> times, double delta);

/// Columnar exports: "t,x,u" every `stride` nodes of every stored state, and
/// "t,front".
void write_field_records(std::ostream& out, const FieldHistory& history, std::size_t stride);
void write_front_records(std::ostream& out, std::span<const double> times, std::span<const double> fronts);

}  // namespace brbm
