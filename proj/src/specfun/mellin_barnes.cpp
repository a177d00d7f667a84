#include "mellin_barnes.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

namespace thzrf::specfun::detail {

namespace {

using cplx = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double log_abs_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return kInf;
    return boost::math::lgamma(x);
}

double gamma_sign(double x) {
    if (x > 0.0) return 1.0;
    return (static_cast<long long>(std::ceil(-x)) % 2 == 0) ? 1.0 : -1.0;
}

cplx log_factor(FormKind kind, cplx L) {
    switch (kind) {
        case FormKind::gamma: return log_gamma(L);
        case FormKind::inv_gamma: return -log_gamma(L);
        case FormKind::pole: return -std::log(L);
    }
    return 0.0;
}

// b + a.c > 0
struct Row {
    std::vector<double> a;
    double b = 0.0;
    double norm = 1.0;
    double slack(const std::vector<double>& c) const {
        double v = b;
        for (std::size_t k = 0; k < c.size(); ++k) v += a[k] * c[k];
        return v;
    }
};

std::vector<Row> constraint_rows(const Integrand& f) {
    std::vector<Row> rows;
    auto push = [&](std::vector<double> a, double b) {
        Row r;
        r.a = std::move(a);
        r.b = b;
        double n = 0.0;
        for (double v : r.a) n += v * v;
        r.norm = std::sqrt(n);
        rows.push_back(std::move(r));
    };
    for (const auto& form : f.forms) {
        if (form.kind == FormKind::inv_gamma) continue;
        std::vector<double> neg(form.weights.size());
        for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -form.weights[k];
        if (form.window == Window::canonical) {
            push(form.weights, form.offset);
        } else {
            push(neg, -form.offset);
            if (form.kind == FormKind::gamma) push(form.weights, form.offset + 1.0);
        }
    }
    return rows;
}

bool solve(std::vector<std::vector<double>> m, std::vector<double> rhs, std::vector<double>& out) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        if (std::fabs(m[piv][col]) < 1e-12) return false;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double fct = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) m[r][c] -= fct * m[col][c];
            rhs[r] -= fct * rhs[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double v = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) v -= m[i][c] * out[c];
        out[i] = v / m[i][i];
    }
    return true;
}

// Centre of the largest ball inside the constraint polytope intersected with
// a box, found by enumerating the vertices of the lifted linear program.
std::vector<double> chebyshev_center(const std::vector<Row>& rows, int dim, double& radius) {
    constexpr double box = 64.0;
    struct Lifted {
        std::vector<double> a;  // dim + 1 entries, last one multiplies the radius
        double rhs;             // a.x >= rhs
    };
    std::vector<Lifted> lifted;
    for (const auto& r : rows) {
        if (r.norm == 0.0) continue;
        Lifted l;
        l.a = r.a;
        l.a.push_back(-r.norm);
        l.rhs = -r.b;
        lifted.push_back(std::move(l));
    }
    for (int k = 0; k < dim; ++k) {
        for (double s : {1.0, -1.0}) {
            Lifted l;
            l.a.assign(dim + 1, 0.0);
            l.a[k] = s;
            l.a[dim] = -1.0;
            l.rhs = -box;
            lifted.push_back(std::move(l));
        }
    }
    {
        Lifted cap;
        cap.a.assign(dim + 1, 0.0);
        cap.a[dim] = -1.0;
        cap.rhs = -1.0;
        lifted.push_back(std::move(cap));
    }

    const int n = dim + 1;
    const int total = static_cast<int>(lifted.size());
    std::vector<int> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;
    double best = -kInf;
    std::vector<double> best_x(dim, 0.0);
    std::vector<double> x;
    while (true) {
        std::vector<std::vector<double>> m(n);
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            m[i] = lifted[pick[i]].a;
            rhs[i] = lifted[pick[i]].rhs;
        }
        if (solve(m, rhs, x) && x[dim] > best) {
            bool ok = true;
            for (const auto& l : lifted) {
                double v = 0.0;
                for (int k = 0; k <= dim; ++k) v += l.a[k] * x[k];
                if (v < l.rhs - 1e-10) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                best = x[dim];
                best_x.assign(x.begin(), x.begin() + dim);
            }
        }
        int i = n - 1;
        while (i >= 0 && pick[i] == total - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    radius = best;
    return best_x;
}

// Cyclic coordinate minimisation of a function that is +inf outside the
// polytope.  Returns false if some coordinate ran into the search limit.
bool coordinate_minimize(const std::function<double(const std::vector<double>&)>& phi,
                         const std::vector<Row>& rows, std::vector<double>& c, double limit) {
    const int dim = static_cast<int>(c.size());
    bool bounded = true;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double moved = 0.0;
        for (int k = 0; k < dim; ++k) {
            double lo = -limit, hi = limit;
            for (const auto& r : rows) {
                if (r.a[k] == 0.0) continue;
                double rest = r.b;
                for (int j = 0; j < dim; ++j)
                    if (j != k) rest += r.a[j] * c[j];
                const double bound = -rest / r.a[k];
                if (r.a[k] > 0.0)
                    lo = std::max(lo, bound);
                else
                    hi = std::min(hi, bound);
            }
            const double margin = 1e-10 * std::max(1.0, hi - lo < 2 * limit ? hi - lo : 1.0);
            lo += margin;
            hi -= margin;
            if (!(hi > lo)) continue;
            std::vector<double> trial = c;
            auto line = [&](double x) {
                trial[k] = x;
                return phi(trial);
            };
            auto [xmin, fmin] = boost::math::tools::brent_find_minima(line, lo, hi, 45);
            (void)fmin;
            if (xmin <= -limit + 1e-3 * limit || xmin >= limit - 1e-3 * limit) bounded = false;
            moved = std::max(moved, std::fabs(xmin - c[k]) / (1.0 + std::fabs(c[k])));
            c[k] = xmin;
        }
        if (moved < 1e-9) break;
    }
    return bounded;
}

}  // namespace

int LinearForm::support() const {
    int s = 0;
    for (double w : weights) s += (w != 0.0);
    return s;
}

double LinearForm::at(const std::vector<double>& c) const {
    double v = offset;
    for (std::size_t k = 0; k < weights.size(); ++k) v += weights[k] * c[k];
    return v;
}

Integrand lower(const FoxHSpec& spec) {
    spec.validate();
    const int dim = static_cast<int>(spec.variables.size());
    Integrand f;
    for (const auto& v : spec.variables) f.log_args.push_back(std::log(v.arg));

    auto coupled = [&](FormKind kind, double offset, const std::vector<double>& w, double sgn) {
        LinearForm form;
        form.kind = kind;
        form.offset = offset;
        form.weights.resize(dim);
        for (int k = 0; k < dim; ++k) form.weights[k] = sgn * w[k];
        f.forms.push_back(std::move(form));
    };
    for (std::size_t j = 0; j < spec.outer_top.size(); ++j) {
        const auto& p = spec.outer_top[j];
        if (static_cast<int>(j) < spec.n_outer)
            coupled(FormKind::gamma, 1.0 - p.coef, p.weights, 1.0);
        else
            coupled(FormKind::inv_gamma, p.coef, p.weights, -1.0);
    }
    for (const auto& p : spec.outer_bottom) coupled(FormKind::inv_gamma, 1.0 - p.coef, p.weights, 1.0);

    for (int k = 0; k < dim; ++k) {
        const auto& v = spec.variables[k];
        auto single = [&](FormKind kind, double offset, double w) {
            LinearForm form;
            form.kind = kind;
            form.offset = offset;
            form.weights.assign(dim, 0.0);
            form.weights[k] = w;
            f.forms.push_back(std::move(form));
        };
        for (std::size_t j = 0; j < v.bottom.size(); ++j) {
            const auto& d = v.bottom[j];
            if (static_cast<int>(j) < v.m)
                single(FormKind::gamma, d.coef, -d.weight);
            else
                single(FormKind::inv_gamma, 1.0 - d.coef, d.weight);
        }
        for (std::size_t j = 0; j < v.top.size(); ++j) {
            const auto& cpar = v.top[j];
            if (static_cast<int>(j) < v.n)
                single(FormKind::gamma, 1.0 - cpar.coef, cpar.weight);
            else
                single(FormKind::inv_gamma, cpar.coef, -cpar.weight);
        }
    }
    canonicalize(f);
    return f;
}

void canonicalize(Integrand& f) {
    auto same_weights = [](const LinearForm& a, const LinearForm& b) {
        for (std::size_t k = 0; k < a.weights.size(); ++k)
            if (std::fabs(a.weights[k] - b.weights[k]) > 1e-14 * (1.0 + std::fabs(a.weights[k])))
                return false;
        return true;
    };
    std::vector<bool> drop(f.forms.size(), false);
    for (std::size_t i = 0; i < f.forms.size(); ++i) {
        if (f.forms[i].kind != FormKind::gamma || drop[i]) continue;
        for (std::size_t j = 0; j < f.forms.size(); ++j) {
            if (drop[j] || f.forms[j].kind != FormKind::inv_gamma) continue;
            if (std::fabs(f.forms[j].offset - f.forms[i].offset - 1.0) >
                1e-14 * (1.0 + std::fabs(f.forms[i].offset)))
                continue;
            if (!same_weights(f.forms[i], f.forms[j])) continue;
            f.forms[i].kind = FormKind::pole;
            drop[j] = true;
            break;
        }
    }
    std::vector<LinearForm> kept;
    for (std::size_t i = 0; i < f.forms.size(); ++i) {
        if (drop[i]) continue;
        auto& form = f.forms[i];
        if (form.support() == 0) {
            const double L = form.offset;
            switch (form.kind) {
                case FormKind::gamma:
                    if (!std::isfinite(log_abs_gamma(L)))
                        throw ContourError("constant Gamma factor sits on a pole");
                    f.log_scale += log_abs_gamma(L);
                    f.sign *= gamma_sign(L);
                    break;
                case FormKind::inv_gamma:
                    if (!std::isfinite(log_abs_gamma(L))) {
                        f.sign = 0.0;
                    } else {
                        f.log_scale -= log_abs_gamma(L);
                        f.sign *= gamma_sign(L);
                    }
                    break;
                case FormKind::pole:
                    if (L == 0.0) throw ContourError("constant pole factor is singular");
                    f.log_scale -= std::log(std::fabs(L));
                    f.sign *= (L > 0.0 ? 1.0 : -1.0);
                    break;
            }
            continue;
        }
        kept.push_back(std::move(form));
    }
    f.forms = std::move(kept);
}

double log_center(const Integrand& f, const std::vector<double>& c) {
    double s = f.log_scale;
    for (int k = 0; k < f.dim(); ++k) s += c[k] * f.log_args[k];
    for (const auto& form : f.forms) {
        double L = form.at(c);
        switch (form.kind) {
            case FormKind::gamma: s += log_abs_gamma(L); break;
            case FormKind::inv_gamma:
                if (L <= 0.0 && L == std::floor(L)) L += 1e-7;
                s -= log_abs_gamma(L);
                break;
            case FormKind::pole: s -= std::log(std::fabs(L)); break;
        }
    }
    return s;
}

void check_offsets(const Integrand& f, const std::vector<double>& c) {
    if (static_cast<int>(c.size()) != f.dim())
        throw ContourError("contour offsets: expected one offset per variable");
    for (const auto& r : constraint_rows(f)) {
        if (!(r.slack(c) > 0.0))
            throw ContourError("contour offsets do not separate the pole families");
    }
}

std::vector<double> place(const Integrand& f, const ContourConfig& cfg) {
    const int dim = f.dim();
    const auto rows = constraint_rows(f);
    double radius = 0.0;
    std::vector<double> start = chebyshev_center(rows, dim, radius);
    if (!(radius > 1e-12))
        throw ContourError("no vertical contour separates the left and right pole families");

    auto barrier = [&](const std::vector<double>& c) {
        double s = 0.0;
        for (const auto& r : rows) {
            const double g = r.slack(c);
            if (!(g > 0.0)) return kInf;
            s -= std::log(g / r.norm);
        }
        return s;
    };
    auto objective = [&](const std::vector<double>& c) {
        const double b = barrier(c);
        if (!std::isfinite(b)) return kInf;
        return log_center(f, c) + b;
    };

    std::vector<double> cf = start;
    coordinate_minimize(objective, rows, cf, 1e4);

    std::vector<double> cb = start;
    std::vector<Row> boxed = rows;
    for (int k = 0; k < dim; ++k) {
        for (double s : {1.0, -1.0}) {
            Row r;
            r.a.assign(dim, 0.0);
            r.a[k] = s;
            r.b = 64.0;
            boxed.push_back(r);
        }
    }
    auto box_barrier = [&](const std::vector<double>& c) {
        double s = 0.0;
        for (const auto& r : boxed) {
            const double g = r.slack(c);
            if (!(g > 0.0)) return kInf;
            s -= std::log(g / r.norm);
        }
        return s;
    };
    coordinate_minimize(box_barrier, boxed, cb, 64.0);
    bool bounded = true;
    for (double v : cb) bounded = bounded && std::fabs(v) < 32.0;
    if (!bounded) return cf;

    const double level = log_center(f, cf) + std::log(cfg.cancellation_budget);
    auto along = [&](double theta) {
        std::vector<double> c(dim);
        for (int k = 0; k < dim; ++k) c[k] = cb[k] + theta * (cf[k] - cb[k]);
        return c;
    };
    if (log_center(f, cb) <= level) return cb;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (log_center(f, along(mid)) <= level)
            hi = mid;
        else
            lo = mid;
    }
    return along(hi);
}

namespace {

struct AxisPlan {
    std::vector<int> singles;  // form indices depending on this axis only
    double distance = kInf;
    double curvature = 0.0;
    double slope = 0.0;
    double half_length = 0.0;
    double step = 0.0;
    long long lattice = 0;     // signed multiple of the base step on the coupled lattice
};

double log_envelope(const Integrand& f, const std::vector<int>& singles, int axis,
                    const std::vector<double>& c, double y) {
    double s = 0.0;
    for (int i : singles) {
        const auto& form = f.forms[i];
        const cplx L(form.at(c), form.weights[axis] * y);
        s += log_factor(form.kind, L).real();
    }
    return s;
}

struct AxisTable {
    int J = 0;
    std::vector<double> re, im, mag, smax;
    double log_scale = 0.0;
};

AxisTable build_axis(const Integrand& f, const AxisPlan& plan, int axis,
                     const std::vector<double>& c) {
    AxisTable t;
    t.J = static_cast<int>(std::ceil(plan.half_length / plan.step));
    const int n = 2 * t.J + 1;
    std::vector<cplx> lg(n);
    double top = -kInf;
    for (int j = -t.J; j <= t.J; ++j) {
        const double y = j * plan.step;
        cplx v(c[axis] * f.log_args[axis], y * f.log_args[axis]);
        for (int i : plan.singles) {
            const auto& form = f.forms[i];
            v += log_factor(form.kind, cplx(form.at(c), form.weights[axis] * y));
        }
        lg[j + t.J] = v;
        top = std::max(top, v.real());
    }
    t.log_scale = top;
    t.re.resize(n);
    t.im.resize(n);
    t.mag.resize(n);
    for (int i = 0; i < n; ++i) {
        const cplx e = std::exp(lg[i] - top);
        t.re[i] = e.real();
        t.im[i] = e.imag();
        t.mag[i] = std::abs(e);
    }
    t.smax.assign(t.J + 2, 0.0);
    for (int r = t.J; r >= 0; --r)
        t.smax[r] = std::max({t.smax[r + 1], t.mag[t.J + r], t.mag[t.J - r]});
    return t;
}

// Largest r with smax[r] >= need, or -1 when even the centre is too small.
int reach(const AxisTable& t, double need) {
    if (t.smax[0] < need) return -1;
    int lo = 0, hi = t.J;
    while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (t.smax[mid] >= need)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

struct LevelSum {
    cplx sum = 0.0;
    double l1 = 0.0;
    std::int64_t nodes = 0;
    double log_scale = 0.0;
    double measure = 1.0;
};

class GridSummer {
public:
    GridSummer(const Integrand& f, const std::vector<AxisPlan>& plans, const std::vector<double>& c,
               int coupled_index, double base_step, double truncation)
        : f_(f), plans_(plans), c_(c), coupled_(coupled_index), base_(base_step), thr_(truncation) {
        dim_ = f.dim();
        for (int k = 0; k < dim_; ++k) axes_.push_back(build_axis(f, plans[k], k, c));
    }

    std::int64_t count() {
        std::int64_t n = 0;
        count_rec(0, 1.0, n);
        return n;
    }

    LevelSum run() {
        LevelSum out;
        out.log_scale = f_.log_scale;
        for (int k = 0; k < dim_; ++k) {
            out.log_scale += axes_[k].log_scale;
            out.measure *= plans_[k].step / kTwoPi;
        }
        if (coupled_ < 0) {
            cplx prod = 1.0;
            double l1 = 1.0;
            for (const auto& a : axes_) {
                cplx s = 0.0;
                double m = 0.0;
                for (std::size_t i = 0; i < a.re.size(); ++i) {
                    s += cplx(a.re[i], a.im[i]);
                    m += a.mag[i];
                }
                prod *= s;
                l1 *= m;
                out.nodes = std::max<std::int64_t>(out.nodes, 1) * static_cast<std::int64_t>(a.re.size());
            }
            out.sum = prod;
            out.l1 = l1;
            return out;
        }
        build_coupled();
        out.log_scale += coupled_scale_;
        sum_re_ = sum_im_ = l1_ = 0.0;
        nodes_ = 0;
        sum_rec(0, 1.0, 0.0, 1.0, 0);
        out.sum = cplx(sum_re_, sum_im_);
        out.l1 = l1_;
        out.nodes = nodes_;
        return out;
    }

private:
    void count_rec(int k, double env, std::int64_t& n) {
        const int r = reach(axes_[k], thr_ / env);
        if (r < 0) return;
        if (k == dim_ - 1) {
            n += 2 * r + 1;
            return;
        }
        const auto& a = axes_[k];
        for (int j = -r; j <= r; ++j) count_rec(k + 1, env * a.mag[a.J + j], n);
    }

    void build_coupled() {
        const auto& form = f_.forms[coupled_];
        long long span = 0;
        for (int k = 0; k < dim_; ++k) span += std::llabs(plans_[k].lattice) * axes_[k].J;
        span_ = span;
        const double re = form.at(c_);
        const std::size_t n = static_cast<std::size_t>(2 * span + 1);
        std::vector<cplx> lg(n);
        double top = -kInf;
        for (long long J = -span; J <= span; ++J) {
            lg[J + span] = log_factor(form.kind, cplx(re, base_ * static_cast<double>(J)));
            top = std::max(top, lg[J + span].real());
        }
        coupled_scale_ = top;
        cre_.resize(n);
        cim_.resize(n);
        cmag_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx e = std::exp(lg[i] - top);
            cre_[i] = e.real();
            cim_[i] = e.imag();
            cmag_[i] = std::abs(e);
        }
    }

    void sum_rec(int k, double pr, double pi, double env, long long idx) {
        const auto& a = axes_[k];
        const int r = reach(a, thr_ / env);
        if (r < 0) return;
        const long long stride = plans_[k].lattice;
        if (k == dim_ - 1) {
            double sr = 0.0, si = 0.0, l1 = 0.0;
            const double* are = a.re.data() + a.J;
            const double* aim = a.im.data() + a.J;
            const double* amg = a.mag.data() + a.J;
            const long long base = idx + span_;
            for (int j = -r; j <= r; ++j) {
                const long long ci = base + stride * j;
                const double xr = are[j] * cre_[ci] - aim[j] * cim_[ci];
                const double xi = are[j] * cim_[ci] + aim[j] * cre_[ci];
                sr += xr;
                si += xi;
                l1 += amg[j] * cmag_[ci];
            }
            sum_re_ += pr * sr - pi * si;
            sum_im_ += pr * si + pi * sr;
            l1_ += env * l1;
            nodes_ += 2 * r + 1;
            return;
        }
        for (int j = -r; j <= r; ++j) {
            const double xr = a.re[a.J + j], xi = a.im[a.J + j];
            sum_rec(k + 1, pr * xr - pi * xi, pr * xi + pi * xr, env * a.mag[a.J + j],
                    idx + stride * j);
        }
    }

    const Integrand& f_;
    const std::vector<AxisPlan>& plans_;
    const std::vector<double>& c_;
    int coupled_;
    double base_;
    double thr_;
    int dim_ = 0;
    std::vector<AxisTable> axes_;
    long long span_ = 0;
    double coupled_scale_ = 0.0;
    std::vector<double> cre_, cim_, cmag_;
    double sum_re_ = 0.0, sum_im_ = 0.0, l1_ = 0.0;
    std::int64_t nodes_ = 0;
};

// Direct evaluation for integrands with several coupled factors.
class DirectSummer {
public:
    DirectSummer(const Integrand& f, const std::vector<AxisPlan>& plans, const std::vector<double>& c,
                 std::vector<int> coupled, double truncation)
        : f_(f), plans_(plans), c_(c), coupled_(std::move(coupled)), thr_(truncation) {
        dim_ = f.dim();
        for (int k = 0; k < dim_; ++k) axes_.push_back(build_axis(f, plans[k], k, c));
        for (int i : coupled_) center_ += log_factor(f.forms[i].kind, cplx(f.forms[i].at(c), 0.0)).real();
    }

    std::int64_t count() {
        std::int64_t n = 0;
        count_rec(0, 1.0, n);
        return n;
    }

    LevelSum run() {
        LevelSum out;
        out.log_scale = f_.log_scale + center_;
        for (int k = 0; k < dim_; ++k) {
            out.log_scale += axes_[k].log_scale;
            out.measure *= plans_[k].step / kTwoPi;
        }
        y_.assign(dim_, 0.0);
        sum_ = 0.0;
        l1_ = 0.0;
        nodes_ = 0;
        rec(0, 1.0, 1.0);
        out.sum = sum_;
        out.l1 = l1_;
        out.nodes = nodes_;
        return out;
    }

private:
    void count_rec(int k, double env, std::int64_t& n) {
        const int r = reach(axes_[k], thr_ / env);
        if (r < 0) return;
        if (k == dim_ - 1) {
            n += 2 * r + 1;
            return;
        }
        const auto& a = axes_[k];
        for (int j = -r; j <= r; ++j) count_rec(k + 1, env * a.mag[a.J + j], n);
    }

    void rec(int k, cplx prod, double env) {
        const auto& a = axes_[k];
        const int r = reach(a, thr_ / env);
        if (r < 0) return;
        for (int j = -r; j <= r; ++j) {
            y_[k] = j * plans_[k].step;
            const cplx v = prod * cplx(a.re[a.J + j], a.im[a.J + j]);
            const double e = env * a.mag[a.J + j];
            if (k + 1 < dim_) {
                rec(k + 1, v, e);
                continue;
            }
            cplx lg = -center_;
            for (int i : coupled_) {
                const auto& form = f_.forms[i];
                double im = 0.0;
                for (int q = 0; q < dim_; ++q) im += form.weights[q] * y_[q];
                lg += log_factor(form.kind, cplx(form.at(c_), im));
            }
            const cplx term = v * std::exp(lg);
            sum_ += term;
            l1_ += std::abs(term);
            ++nodes_;
        }
    }

    const Integrand& f_;
    const std::vector<AxisPlan>& plans_;
    const std::vector<double>& c_;
    std::vector<int> coupled_;
    double thr_;
    int dim_ = 0;
    double center_ = 0.0;
    std::vector<AxisTable> axes_;
    std::vector<double> y_;
    cplx sum_ = 0.0;
    double l1_ = 0.0;
    std::int64_t nodes_ = 0;
};

double singular_distance(const LinearForm& form, double L) {
    if (form.kind == FormKind::inv_gamma) return kInf;
    if (form.window == Window::canonical) return L;
    if (form.kind == FormKind::gamma) return std::min(-L, 1.0 + L);
    return -L;
}

double curvature(const LinearForm& form, double L) {
    switch (form.kind) {
        case FormKind::gamma: return boost::math::trigamma(L);
        case FormKind::inv_gamma:
            if (L <= 0.0 && L == std::floor(L)) return 0.0;
            return -boost::math::trigamma(L);
        case FormKind::pole: return 1.0 / (L * L);
    }
    return 0.0;
}

// d/dc log|F(L(c))| per unit weight
double log_slope(const LinearForm& form, double L) {
    switch (form.kind) {
        case FormKind::gamma: return boost::math::digamma(L);
        case FormKind::inv_gamma:
            if (L <= 0.0 && L == std::floor(L)) return 0.0;
            return -boost::math::digamma(L);
        case FormKind::pole: return -1.0 / L;
    }
    return 0.0;
}

}  // namespace

namespace {

struct Plan {
    std::vector<double> c;
    std::vector<AxisPlan> axes;
    std::vector<int> coupled;
    int lattice_form = -1;
    double base_step = 0.0;
    double log_center = 0.0;
    double est_nodes = 1.0;  // unpruned size of the first level
};

// Finer lattice subdivisions keep each axis close to its own step when one
// coupled factor ties the axes together.
constexpr double kLatticeSubdivision = 4.0;

Plan make_plan(const Integrand& f, const ContourConfig& cfg, bool user_offsets) {
    Plan plan;
    const int dim = f.dim();
    if (user_offsets) {
        plan.c = cfg.offsets;
        check_offsets(f, plan.c);
    } else {
        plan.c = place(f, cfg);
    }
    const auto& c = plan.c;
    plan.log_center = log_center(f, c);

    auto& plans = plan.axes;
    plans.resize(dim);
    for (int k = 0; k < dim; ++k) plans[k].slope = f.log_args[k];
    for (int i = 0; i < static_cast<int>(f.forms.size()); ++i) {
        const auto& form = f.forms[i];
        const double L = form.at(c);
        if (form.support() == 1) {
            for (int k = 0; k < dim; ++k)
                if (form.weights[k] != 0.0) plans[k].singles.push_back(i);
        } else {
            plan.coupled.push_back(i);
        }
        const double d = singular_distance(form, L);
        for (int k = 0; k < dim; ++k) {
            const double w = form.weights[k];
            if (w == 0.0) continue;
            plans[k].distance = std::min(plans[k].distance, d / std::fabs(w));
            plans[k].curvature += w * w * curvature(form, L);
            plans[k].slope += w * log_slope(form, L);
        }
    }

    const double log_trunc = std::log(cfg.truncation);
    for (int k = 0; k < dim; ++k) {
        auto& p = plans[k];
        if (cfg.half_length > 0.0) {
            p.half_length = cfg.half_length;
            continue;
        }
        const double width = 1.0 / std::sqrt(std::max(p.curvature, 1e-8));
        const double dy0 = 0.25 * std::min(1.0, width);
        double peak = log_envelope(f, p.singles, k, c, 0.0);
        double y = 0.0;
        while (true) {
            y += std::max(dy0, 0.02 * y);
            if (y > 2e4) {
                throw EvaluationError("Mellin-Barnes integrand does not decay along axis " +
                                          std::to_string(k),
                                      std::numeric_limits<double>::quiet_NaN(), kInf);
            }
            const double e = log_envelope(f, p.singles, k, c, y);
            if (e > peak) {
                peak = e;
                continue;
            }
            if (e - peak < log_trunc) break;
        }
        p.half_length = y;
    }

    // Trapezoidal error on a line is about exp(g d + k d^2 / 2 - 2 pi d / h) for
    // any shift d inside the pole-free strip, with g and k the slope and
    // curvature of log|f| across the line.
    const double budget = std::log(1.0 / cfg.tolerance) + 4.0;
    for (int k = 0; k < dim; ++k) {
        auto& p = plans[k];
        const double grid = 2.0 * p.half_length / cfg.nodes_per_axis;
        if (cfg.refinement == Refinement::fixed) {
            p.step = grid;
            continue;
        }
        const double kappa = std::max(p.curvature, 0.0);
        double shift = p.distance;
        if (kappa > 0.0) shift = std::min(shift, std::sqrt(2.0 * budget / kappa));
        if (!std::isfinite(shift)) shift = 1.0;
        const double strip = kTwoPi * shift / (budget + std::fabs(p.slope) * shift + 0.5 * kappa * shift * shift);
        p.step = std::min(strip, grid);
    }

    if (plan.coupled.size() == 1) {
        plan.lattice_form = plan.coupled[0];
        const auto& w = f.forms[plan.lattice_form].weights;
        double base = kInf;
        for (int k = 0; k < dim; ++k)
            if (w[k] != 0.0) base = std::min(base, plans[k].step * std::fabs(w[k]));
        base /= kLatticeSubdivision;
        for (int k = 0; k < dim; ++k) {
            if (w[k] == 0.0) {
                plans[k].lattice = 0;
                continue;
            }
            const long long n = std::max<long long>(
                1, static_cast<long long>(std::floor(plans[k].step * std::fabs(w[k]) / base + 1e-9)));
            plans[k].lattice = (w[k] > 0.0 ? n : -n);
            plans[k].step = n * base / std::fabs(w[k]);
        }
        plan.base_step = base;
    }
    for (const auto& p : plans) plan.est_nodes *= 2.0 * std::ceil(p.half_length / p.step) + 1.0;
    return plan;
}

Outcome run_plan(const Integrand& f, Plan plan, const ContourConfig& cfg) {
    Outcome out;
    const auto& c = plan.c;
    auto& plans = plan.axes;
    const auto& coupled = plan.coupled;
    const int lattice_form = plan.lattice_form;
    double& base_step = plan.base_step;

    auto run_level = [&](LevelSum& level) {
        if (coupled.size() <= 1) {
            GridSummer g(f, plans, c, lattice_form, base_step, cfg.truncation);
            const auto n = g.count();
            if (n > cfg.node_budget)
                throw BudgetError("Mellin-Barnes grid needs " + std::to_string(n) +
                                      " nodes, above the configured budget",
                                  std::numeric_limits<double>::quiet_NaN(), kInf);
            level = g.run();
        } else {
            DirectSummer g(f, plans, c, coupled, cfg.truncation);
            const auto n = g.count();
            if (n > cfg.node_budget)
                throw BudgetError("Mellin-Barnes grid needs " + std::to_string(n) +
                                      " nodes, above the configured budget",
                                  std::numeric_limits<double>::quiet_NaN(), kInf);
            level = g.run();
        }
    };
    auto scaled = [&](const LevelSum& l, cplx v) { return f.sign * std::exp(l.log_scale) * l.measure * v; };
    auto halve = [&](double factor) {
        base_step *= factor;
        for (auto& p : plans) p.step *= factor;
    };

    auto finish = [&](const LevelSum& l, double err) {
        const cplx v = scaled(l, l.sum);
        const double l1 = std::fabs(scaled(l, l.l1).real());
        if (!(std::fabs(v.imag()) < 1e-8 * std::fabs(v.real()) + 1e-12)) {
            throw EvaluationError("Mellin-Barnes result has a non-negligible imaginary part",
                                  v.real(), std::fabs(v.imag()));
        }
        out.value = v.real();
        out.abs_error = err + cfg.truncation * l1;
    };

    if (cfg.refinement == Refinement::fixed) {
        LevelSum coarse, fine;
        halve(2.0);
        run_level(coarse);
        halve(0.5);
        run_level(fine);
        out.nodes = coarse.nodes + fine.nodes;
        finish(fine, std::abs(scaled(fine, fine.sum) - scaled(coarse, coarse.sum)));
        return out;
    }

    LevelSum prev;
    run_level(prev);
    out.nodes = prev.nodes;
    double diff = kInf;
    for (int level = 1; level <= cfg.max_halvings; ++level) {
        halve(0.5);
        LevelSum cur;
        run_level(cur);
        out.nodes += cur.nodes;
        const cplx vc = scaled(cur, cur.sum);
        const cplx vp = scaled(prev, prev.sum);
        diff = std::abs(vc - vp);
        const double l1 = std::fabs(scaled(cur, cur.l1).real());
        if (diff <= std::max(cfg.tolerance * std::abs(vc), 100.0 * std::numeric_limits<double>::epsilon() * l1)) {
            finish(cur, diff);
            return out;
        }
        prev = cur;
    }
    const cplx v = scaled(prev, prev.sum);
    throw EvaluationError("Mellin-Barnes quadrature did not reach the requested tolerance", v.real(), diff);
}

}  // namespace

Outcome integrate(const Integrand& f, const ContourConfig& cfg, bool user_offsets) {
    if (f.sign == 0.0) return {};
    if (f.dim() == 0) {
        Outcome out;
        out.value = f.sign * std::exp(f.log_scale);
        return out;
    }
    return run_plan(f, make_plan(f, cfg, user_offsets), cfg);
}

namespace {

struct Peel {
    int form = -1;
    double pole = 0.0;
    double weight = 0.0;
};

Integrand make_term(const Integrand& base, const std::vector<Peel>& peels, unsigned residue_mask,
                    unsigned crossed_mask) {
    const int dim = base.dim();
    Integrand t;
    t.log_scale = base.log_scale;
    t.sign = base.sign;
    std::vector<int> keep;
    for (int k = 0; k < dim; ++k) {
        if (residue_mask & (1u << k)) {
            t.log_scale += peels[k].pole * base.log_args[k];
        } else {
            keep.push_back(k);
            t.log_args.push_back(base.log_args[k]);
        }
    }
    for (int i = 0; i < static_cast<int>(base.forms.size()); ++i) {
        const auto& form = base.forms[i];
        int owner = -1;
        for (int k = 0; k < dim; ++k)
            if (peels[k].form == i) owner = k;
        if (owner >= 0 && (residue_mask & (1u << owner))) {
            t.log_scale -= std::log(std::fabs(peels[owner].weight));
            continue;
        }
        LinearForm g;
        g.kind = form.kind;
        g.offset = form.offset;
        for (int k = 0; k < dim; ++k)
            if (residue_mask & (1u << k)) g.offset += form.weights[k] * peels[k].pole;
        for (int k : keep) g.weights.push_back(form.weights[k]);
        g.window = (owner >= 0 && (crossed_mask & (1u << owner))) ? Window::crossed : form.window;
        t.forms.push_back(std::move(g));
    }
    canonicalize(t);
    return t;
}

}  // namespace

namespace {

// Routes whose largest term is within this factor of the best route are
// treated as equally accurate and compared on cost.
const double kRouteSlack = std::log(100.0);
// Plans below this size are run without searching for a cheaper route.
constexpr double kCheapNodes = 2e6;

// A route crosses the first pole of at most one single-variable factor per
// variable.  The original integral equals the sum of the crossed integral and
// every lower-dimensional residue term.
struct Route {
    std::vector<Peel> peels;
    unsigned crossed = 0;
    bool direct_tail = false;  // tail summed from terms instead of value - residue
    std::vector<std::pair<Integrand, Plan>> terms;
    double magnitude = -kInf;
    double cost = 0.0;
};

std::optional<Route> build_route(const Integrand& f, const ContourConfig& cfg, std::vector<Peel> peels,
                                 unsigned requested, double residue_center) {
    Route r;
    r.peels = std::move(peels);
    for (int k = 0; k < f.dim(); ++k)
        if (r.peels[k].form >= 0) r.crossed |= (1u << k);
    r.direct_tail = requested != 0 && (requested & r.crossed) == requested;
    if (requested != 0 && !r.direct_tail) r.magnitude = residue_center;
    try {
        for (unsigned mask = 0; mask <= r.crossed; ++mask) {
            if ((mask & r.crossed) != mask) continue;
            if (r.direct_tail && (mask & requested) == requested) continue;
            Integrand term = make_term(f, r.peels, mask, r.crossed & ~mask);
            if (term.sign == 0.0) continue;
            Plan plan;
            if (term.dim() > 0) {
                plan = make_plan(term, cfg, false);
            } else {
                plan.log_center = term.log_scale;
            }
            r.magnitude = std::max(r.magnitude, plan.log_center);
            r.cost += plan.est_nodes;
            r.terms.emplace_back(std::move(term), std::move(plan));
        }
    } catch (const ContourError&) {
        return std::nullopt;
    } catch (const EvaluationError&) {
        return std::nullopt;
    }
    return r;
}

Outcome run_term(const Integrand& term, const Plan& plan, const ContourConfig& cfg) {
    if (term.dim() == 0) {
        Outcome o;
        o.value = term.sign * std::exp(term.log_scale);
        return o;
    }
    return run_plan(term, plan, cfg);
}

}  // namespace

MellinBarnesResult evaluate(const Integrand& f, const ContourConfig& cfg,
                            const std::vector<std::optional<double>>& peel) {
    MellinBarnesResult res;
    const int dim = f.dim();
    const bool user = !cfg.offsets.empty();
    bool any = false;
    for (const auto& p : peel) any = any || p.has_value();
    if (any && static_cast<int>(peel.size()) != dim)
        throw std::invalid_argument("peel list must have one entry per variable");

    std::vector<Peel> requested_peels(dim);
    unsigned requested = 0;
    for (int k = 0; any && k < dim; ++k) {
        if (!peel[k]) continue;
        const double s = *peel[k];
        for (int i = 0; i < static_cast<int>(f.forms.size()); ++i) {
            const auto& form = f.forms[i];
            if (form.kind == FormKind::inv_gamma || form.support() != 1 || form.weights[k] == 0.0) continue;
            if (std::fabs(form.offset + form.weights[k] * s) > 1e-12 * (1.0 + std::fabs(form.offset))) continue;
            requested_peels[k] = {i, s, form.weights[k]};
            break;
        }
        if (requested_peels[k].form < 0)
            throw std::invalid_argument("no single-variable numerator factor has a pole at the requested point");
        requested |= (1u << k);
    }

    if (user || dim == 0 || f.sign == 0.0) {
        const auto o = integrate(f, cfg, user);
        res.value = o.value;
        res.abs_error = o.abs_error;
        res.nodes = o.nodes;
        if (requested) {
            const auto r = integrate(make_term(f, requested_peels, requested, 0u), cfg, false);
            res.residue = r.value;
            res.abs_error += r.abs_error;
            res.nodes += r.nodes;
        }
        res.tail = res.value - res.residue;
        return res;
    }

    double residue_center = -kInf;
    Integrand residue_term;
    Plan residue_plan;
    if (requested) {
        residue_term = make_term(f, requested_peels, requested, 0u);
        if (residue_term.dim() > 0) {
            residue_plan = make_plan(residue_term, cfg, false);
            residue_center = residue_plan.log_center;
        } else {
            residue_center = residue_term.log_scale;
        }
    }

    std::vector<Route> routes;
    auto consider = [&](const std::vector<Peel>& peels) {
        if (auto r = build_route(f, cfg, peels, requested, residue_center)) routes.push_back(std::move(*r));
    };
    consider(std::vector<Peel>(dim));
    if (requested) consider(requested_peels);

    auto pick = [&]() -> const Route* {
        if (routes.empty()) return nullptr;
        double best = kInf;
        for (const auto& r : routes) best = std::min(best, r.magnitude);
        const Route* choice = nullptr;
        for (const auto& r : routes) {
            if (r.magnitude > best + kRouteSlack) continue;
            if (!choice || r.cost < choice->cost) choice = &r;
        }
        return choice;
    };

    const Route* route = pick();
    if (!route || route->cost > kCheapNodes) {
        // Search over crossing one pole per variable.
        std::vector<std::vector<Peel>> options(dim);
        for (int k = 0; k < dim; ++k) {
            options[k].push_back(Peel{});
            if (requested & (1u << k)) {
                options[k].push_back(requested_peels[k]);
                continue;
            }
            for (int i = 0; i < static_cast<int>(f.forms.size()); ++i) {
                const auto& form = f.forms[i];
                if (form.kind == FormKind::inv_gamma || form.support() != 1 || form.weights[k] == 0.0) continue;
                options[k].push_back({i, -form.offset / form.weights[k], form.weights[k]});
            }
        }
        std::vector<std::size_t> pos(dim, 0);
        while (true) {
            std::vector<Peel> peels(dim);
            for (int k = 0; k < dim; ++k) peels[k] = options[k][pos[k]];
            // The two default routes are already in the list.
            bool all_req = true, none = true;
            for (int k = 0; k < dim; ++k) {
                if (peels[k].form >= 0) none = false;
                if ((requested & (1u << k)) && peels[k].form < 0) all_req = false;
                if (!(requested & (1u << k)) && peels[k].form >= 0) all_req = false;
            }
            if (!(none || (requested && all_req))) consider(peels);
            int k = 0;
            while (k < dim && ++pos[k] == options[k].size()) pos[k++] = 0;
            if (k == dim) break;
        }
        route = pick();
    }
    if (!route) throw ContourError("no vertical contour separates the left and right pole families");

    res.crossed_route = route->crossed != 0;
    double total = 0.0;
    for (const auto& [term, plan] : route->terms) {
        const auto o = run_term(term, plan, cfg);
        total += o.value;
        res.abs_error += o.abs_error;
        res.nodes += o.nodes;
    }
    if (requested) {
        const auto r = run_term(residue_term, residue_plan, cfg);
        res.residue = r.value;
        res.abs_error += r.abs_error;
        res.nodes += r.nodes;
    }
    if (route->direct_tail) {
        res.tail = total;
        res.value = total + res.residue;
    } else {
        res.value = total;
        res.tail = total - res.residue;
    }
    return res;
}

}  // namespace thzrf::specfun::detail
