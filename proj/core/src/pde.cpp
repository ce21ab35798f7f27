#include "ranklab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ranklab/errors.hpp"
#include "ranklab/io.hpp"

namespace ranklab {

namespace {
constexpr double kInitMassTol = 1e-8;
constexpr double kMonotoneTol = 1e-10;

double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

void validate_grid_args(double x_min, double x_max, int nx) {
    if (!(x_max > x_min)) throw invalid_parameter("grid: need x_max > x_min");
    if (nx < 4) throw invalid_parameter("grid: need at least 4 cells");
}
}  // namespace

double GridCDF::cdf(double x) const {
    if (x <= x_min) return 0.0;
    if (x >= x_max) return 1.0;
    const int n = nx();
    // anchors: (x_min, 0), centers, (x_max, 1)
    const double first = x_center(0), last = x_center(n - 1);
    if (x <= first) {
        return values[0] * (x - x_min) / (first - x_min);
    }
    if (x >= last) {
        return values[static_cast<std::size_t>(n - 1)] +
               (1.0 - values[static_cast<std::size_t>(n - 1)]) * (x - last) / (x_max - last);
    }
    const int j = static_cast<int>((x - first) / dx);
    const int jj = std::clamp(j, 0, n - 2);
    const double xl = x_center(jj);
    const double w = (x - xl) / dx;
    return values[static_cast<std::size_t>(jj)] +
           w * (values[static_cast<std::size_t>(jj + 1)] - values[static_cast<std::size_t>(jj)]);
}

double GridCDF::quantile(double v) const {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::domain_error("grid quantile: order must lie in (0,1)");
    const int n = nx();
    const auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.begin()) {
        // crossing between the left wall and the first center
        const double u0 = values[0];
        if (u0 <= 0.0) return x_center(0);
        return x_min + (v / u0) * (x_center(0) - x_min);
    }
    if (it == values.end()) {
        const double un = values[static_cast<std::size_t>(n - 1)];
        if (un >= 1.0) return x_center(n - 1);
        return x_center(n - 1) + (v - un) / (1.0 - un) * (x_max - x_center(n - 1));
    }
    const int j = static_cast<int>(it - values.begin());
    const double u1 = values[static_cast<std::size_t>(j)];
    const double u0 = values[static_cast<std::size_t>(j - 1)];
    if (u1 <= u0) return x_center(j);
    return x_center(j - 1) + (v - u0) / (u1 - u0) * dx;
}

double GridCDF::mean() const {
    double acc = 0.0;
    for (double u : values) acc += u;
    return x_max - dx * acc;
}

GridCDF init_grid_from_cdf(const std::function<double(double)>& cdf, double x_min,
                           double x_max, int nx) {
    validate_grid_args(x_min, x_max, nx);
    const double outside = cdf(x_min) + (1.0 - cdf(x_max));
    if (outside > kInitMassTol) {
        std::ostringstream os;
        os << "init_grid: domain [" << x_min << ", " << x_max << "] misses " << outside
           << " of the initial mass (tolerance " << kInitMassTol << ")";
        throw domain_too_small(os.str());
    }
    GridCDF g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.dx = (x_max - x_min) / nx;
    g.t = 0.0;
    g.values.resize(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j)
        g.values[static_cast<std::size_t>(j)] =
            std::clamp(cdf(g.x_center(j)), 0.0, 1.0);
    return g;
}

GridCDF init_grid(const InitialLaw& m, double x_min, double x_max, int nx) {
    validate_grid_args(x_min, x_max, nx);
    const double outside = m.mass_outside(x_min, x_max);
    if (outside > kInitMassTol) {
        std::ostringstream os;
        os << "init_grid: domain [" << x_min << ", " << x_max << "] misses " << outside
           << " of the initial mass (tolerance " << kInitMassTol << ")";
        throw domain_too_small(os.str());
    }
    return init_grid_from_cdf([&m](double x) { return m.cdf(x); }, x_min, x_max, nx);
}

namespace {

struct SchemeWorkspace {
    std::vector<double> a_of_u;   // A(u_j)
    std::vector<double> flux;     // interface fluxes, nx+1 faces
    std::vector<double> slope;    // reconstruction slopes
};

// One explicit step of size dt. Ghost states are 0 on the left and 1 on
// the right, so A-ghosts are A(0) = 0 and A(1).
void step_once(GridCDF& g, const MeanFieldProfile& mf, double dt, int order,
               SchemeWorkspace& ws) {
    const int n = g.nx();
    const double dx = g.dx;
    auto& u = g.values;
    ws.a_of_u.resize(static_cast<std::size_t>(n));
    ws.flux.resize(static_cast<std::size_t>(n + 1));
    for (int j = 0; j < n; ++j)
        ws.a_of_u[static_cast<std::size_t>(j)] = mf.viscosity_A(u[static_cast<std::size_t>(j)]);
    const double a_right = mf.viscosity_A(1.0);

    auto cell = [&](int j) -> double {
        if (j < 0) return 0.0;
        if (j >= n) return 1.0;
        return u[static_cast<std::size_t>(j)];
    };

    const bool driftless = mf.max_abs_drift() == 0.0;
    if (driftless) std::fill(ws.flux.begin(), ws.flux.end(), 0.0);

    if (!driftless && order == 2) {
        ws.slope.assign(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j)
            ws.slope[static_cast<std::size_t>(j)] =
                minmod(cell(j) - cell(j - 1), cell(j + 1) - cell(j));
    }

    for (int f = 0; !driftless && f <= n; ++f) {
        double ul, ur;
        if (order == 2) {
            ul = f - 1 >= 0 ? cell(f - 1) + 0.5 * ws.slope[static_cast<std::size_t>(f - 1)]
                            : 0.0;
            ur = f < n ? cell(f) - 0.5 * ws.slope[static_cast<std::size_t>(f)] : 1.0;
        } else {
            ul = cell(f - 1);
            ur = cell(f);
        }
        ul = std::clamp(ul, 0.0, 1.0);
        ur = std::clamp(ur, 0.0, 1.0);
        ws.flux[static_cast<std::size_t>(f)] = mf.flux_B_plus(ul) + mf.flux_B_minus(ur);
    }

    for (int j = 0; j < n; ++j) {
        const double a_m = j - 1 >= 0 ? ws.a_of_u[static_cast<std::size_t>(j - 1)] : 0.0;
        const double a_p = j + 1 < n ? ws.a_of_u[static_cast<std::size_t>(j + 1)] : a_right;
        const double diff = (a_p - 2.0 * ws.a_of_u[static_cast<std::size_t>(j)] + a_m) / (dx * dx);
        const double adv =
            (ws.flux[static_cast<std::size_t>(j + 1)] - ws.flux[static_cast<std::size_t>(j)]) / dx;
        u[static_cast<std::size_t>(j)] += dt * (diff - adv);
    }
}

void check_state(const GridCDF& g, double boundary_tol) {
    const auto& u = g.values;
    const int n = g.nx();
    if (u[0] < -kMonotoneTol || u[static_cast<std::size_t>(n - 1)] > 1.0 + kMonotoneTol)
        throw scheme_failure("grid values left [0,1]");
    for (int j = 1; j < n; ++j)
        if (u[static_cast<std::size_t>(j)] - u[static_cast<std::size_t>(j - 1)] < -kMonotoneTol)
            throw scheme_failure("monotonicity violated beyond tolerance; check the CFL setup");
    if (u[0] > boundary_tol || u[static_cast<std::size_t>(n - 1)] < 1.0 - boundary_tol) {
        std::ostringstream os;
        os << "evolve: solution mass reached the domain walls at t = " << g.t
           << " (u[0] = " << u[0] << ", u[last] = " << u[static_cast<std::size_t>(n - 1)]
           << "); enlarge [x_min, x_max]";
        throw domain_too_small(os.str());
    }
}

}  // namespace

GridCDF evolve(const GridCDF& g, const MeanFieldProfile& mf, double t_target,
               const EvolveOptions& opts) {
    if (t_target < g.t) throw invalid_parameter("evolve: t_target must be >= current time");
    if (opts.flux_order != 1 && opts.flux_order != 2)
        throw invalid_parameter("evolve: flux_order must be 1 or 2");
    if (!(opts.safety > 0.0) || opts.safety > 1.0)
        throw invalid_parameter("evolve: safety must lie in (0,1]");

    GridCDF out = g;
    check_state(out, opts.boundary_tol);
    const double max_a_prime = 0.5 * mf.max_sigma2();
    const double max_b = mf.max_abs_drift();
    const double dx = out.dx;
    const double rate = 2.0 * max_a_prime / (dx * dx) +
                        static_cast<double>(opts.flux_order) * max_b / dx;
    const double dt_max = opts.safety / rate;

    SchemeWorkspace ws;
    double remaining = t_target - out.t;
    while (remaining > 1e-12 * std::max(1.0, std::abs(t_target))) {
        const double dt = std::min(dt_max, remaining);
        step_once(out, mf, dt, opts.flux_order, ws);
        out.t += dt;
        remaining = t_target - out.t;
        check_state(out, opts.boundary_tol);
        for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);  // rounding only
    }
    out.t = t_target;
    return out;
}

double l1_distance(const GridCDF& g, const std::function<double(double)>& reference) {
    const int n = g.nx();
    // trapezoid over wall, centers, wall
    double total = 0.0;
    double x_prev = g.x_min;
    double d_prev = std::abs(0.0 - reference(g.x_min));
    for (int j = 0; j < n; ++j) {
        const double x = g.x_center(j);
        const double d = std::abs(g.values[static_cast<std::size_t>(j)] - reference(x));
        total += 0.5 * (d + d_prev) * (x - x_prev);
        x_prev = x;
        d_prev = d;
    }
    const double d_last = std::abs(1.0 - reference(g.x_max));
    total += 0.5 * (d_last + d_prev) * (g.x_max - x_prev);
    return total;
}

double l1_distance(const GridCDF& g, const GridCDF& other, bool allow_resample) {
    const bool same = other.nx() == g.nx() &&
                      std::abs(other.x_min - g.x_min) <= 1e-12 * std::max(1.0, std::abs(g.x_min)) &&
                      std::abs(other.x_max - g.x_max) <= 1e-12 * std::max(1.0, std::abs(g.x_max));
    if (!same && !allow_resample)
        throw incompatible_grids("l1_distance: grids differ; pass allow_resample to interpolate");
    if (same) {
        double total = 0.0;
        double d_prev = 0.0;  // both CDFs are 0 at the wall
        double x_prev = g.x_min;
        for (int j = 0; j < g.nx(); ++j) {
            const double d = std::abs(g.values[static_cast<std::size_t>(j)] -
                                      other.values[static_cast<std::size_t>(j)]);
            total += 0.5 * (d + d_prev) * (g.x_center(j) - x_prev);
            d_prev = d;
            x_prev = g.x_center(j);
        }
        total += 0.5 * d_prev * (g.x_max - x_prev);
        return total;
    }
    return l1_distance(g, [&other](double x) { return other.cdf(x); });
}

void write_grid(const std::filesystem::path& path, const GridCDF& g) {
    std::ostringstream os;
    os << "# t " << format_double(g.t) << "\n";
    for (int j = 0; j < g.nx(); ++j)
        os << format_double(g.x_center(j)) << "," << format_double(g.values[static_cast<std::size_t>(j)])
           << "\n";
    atomic_write(path, os.str());
}

GridCDF read_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw invalid_parameter("read_grid: cannot open " + path.string());
    GridCDF g;
    std::vector<double> xs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tag;
            if (ls >> tag && tag == "t") ls >> g.t;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, u;
        if (ls >> x >> u) {
            xs.push_back(x);
            g.values.push_back(u);
        }
    }
    if (xs.size() < 4) throw invalid_parameter("read_grid: too few rows in " + path.string());
    g.dx = xs[1] - xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - xs[i - 1] - g.dx) > 1e-9 * std::max(1.0, std::abs(g.dx)))
            throw invalid_parameter("read_grid: grid is not uniform in " + path.string());
    g.x_min = xs.front() - 0.5 * g.dx;
    g.x_max = xs.back() + 0.5 * g.dx;
    return g;
}

}  // namespace ranklab
