#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace abj {

class NonFiniteSample : public std::runtime_error {
public:
    NonFiniteSample(std::vector<double> point, const std::string& where)
        : std::runtime_error(describe(point, where)), point_(std::move(point)) {}
    const std::vector<double>& point() const { return point_; }

private:
    static std::string describe(const std::vector<double>& p, const std::string& where) {
        std::ostringstream os;
        os.precision(17);
        os << "non-finite integrand value at " << where << " point (";
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
        os << ")";
        return os.str();
    }
    std::vector<double> point_;
};

enum class ErrorNorm {
    // every component must meet its own tolerance
    Individual,
    // the largest component error is compared against the largest component magnitude
    Max,
};

struct CubatureOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-6;
    std::size_t max_evaluations = 100'000'000;
    unsigned workers = 1;
    std::size_t batch = 32;
    std::size_t initial_divisions = 1;
    ErrorNorm norm = ErrorNorm::Max;
};

// Leaf boxes of an adaptive run, in creation order. Re-evaluating an integrand on a frozen
// mesh gives values that vary smoothly with integrand parameters.
struct CubatureMesh {
    std::size_t dim = 0;
    std::vector<double> centers;
    std::vector<double> halves;
    std::size_t size() const { return dim == 0 ? 0 : centers.size() / dim; }
};

struct CubatureResult {
    std::vector<double> value;
    std::vector<double> error;
    std::size_t evaluations = 0;
    std::size_t regions = 0;
    bool converged = false;
    CubatureMesh mesh;
};

namespace detail {

// Embedded degree-7/5 rule of Genz and Malik for dim >= 2, Gauss-Kronrod 15/7 for dim == 1.
// Points are offsets in [-1,1]^dim; weights are normalized to sum to one.
class EmbeddedRule {
public:
    explicit EmbeddedRule(std::size_t dim) : dim_(dim) {
        if (dim == 0) throw std::invalid_argument("cubature dimension must be positive");
        if (dim == 1) build_kronrod();
        else build_genz_malik();
    }

    std::size_t dim() const { return dim_; }
    std::size_t points() const { return offsets_.size() / dim_; }
    const double* offset(std::size_t k) const { return offsets_.data() + k * dim_; }

    // vals: points() x ncomp values. Writes the rule value and error estimate per component
    // (already multiplied by the box volume) and returns the preferred split axis.
    std::size_t apply(const double* vals, std::size_t ncomp, const double* half, double* value,
                      double* error) const {
        double vol = 1.0;
        for (std::size_t i = 0; i < dim_; ++i) vol *= 2.0 * half[i];
        const std::size_t np = points();
        for (std::size_t c = 0; c < ncomp; ++c) {
            double hi = 0.0, lo = 0.0, mag = 0.0;
            for (std::size_t k = 0; k < np; ++k) {
                const double f = vals[k * ncomp + c];
                hi += w_high_[k] * f;
                lo += w_low_[k] * f;
                mag += std::abs(w_high_[k] * f);
            }
            value[c] = vol * hi;
            // the rounding floor keeps the estimate honest when both rules agree exactly
            error[c] = vol * std::max({std::abs(hi - lo), 1e-15 * mag, 1e-300});
        }
        if (dim_ == 1) return 0;
        // fourth divided difference along each axis selects the split direction
        std::size_t best = 0;
        double best_diff = -1.0, widest = -1.0;
        std::size_t widest_axis = 0;
        std::vector<double> diffs(dim_, 0.0);
        const double ratio = (9.0 / 70.0) / (9.0 / 10.0);
        for (std::size_t i = 0; i < dim_; ++i) {
            double d = 0.0;
            for (std::size_t c = 0; c < ncomp; ++c) {
                const double f0 = vals[c];
                const double a = vals[(1 + 2 * i) * ncomp + c] + vals[(2 + 2 * i) * ncomp + c] - 2 * f0;
                const double b =
                    vals[(1 + 2 * dim_ + 2 * i) * ncomp + c] + vals[(2 + 2 * dim_ + 2 * i) * ncomp + c] - 2 * f0;
                d += std::abs(a - ratio * b);
            }
            diffs[i] = d;
            if (half[i] > widest) {
                widest = half[i];
                widest_axis = i;
            }
            if (d > best_diff) {
                best_diff = d;
                best = i;
            }
        }
        double min_diff = *std::min_element(diffs.begin(), diffs.end());
        if (best_diff <= 0.0 || best_diff - min_diff <= 1e-10 * best_diff) return widest_axis;
        return best;
    }

private:
    void push(const std::vector<double>& off, double wh, double wl) {
        offsets_.insert(offsets_.end(), off.begin(), off.end());
        w_high_.push_back(wh);
        w_low_.push_back(wl);
    }

    void build_genz_malik() {
        const double n = static_cast<double>(dim_);
        const double l2 = std::sqrt(9.0 / 70.0), l3 = std::sqrt(9.0 / 10.0), l4 = std::sqrt(9.0 / 10.0),
                     l5 = std::sqrt(9.0 / 19.0);
        const double w1 = (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0, w2 = 980.0 / 6561.0,
                     w3 = (1820.0 - 400.0 * n) / 19683.0, w4 = 200.0 / 19683.0,
                     w5 = 6859.0 / 19683.0 / std::ldexp(1.0, static_cast<int>(dim_));
        const double v1 = (729.0 - 950.0 * n + 50.0 * n * n) / 729.0, v2 = 245.0 / 486.0,
                     v3 = (265.0 - 100.0 * n) / 1458.0, v4 = 25.0 / 729.0;
        std::vector<double> off(dim_, 0.0);
        push(off, w1, v1);
        for (double lam : {l2, l3}) {
            const bool second = lam == l3;
            for (std::size_t i = 0; i < dim_; ++i) {
                for (double sg : {1.0, -1.0}) {
                    std::fill(off.begin(), off.end(), 0.0);
                    off[i] = sg * lam;
                    push(off, second ? w3 : w2, second ? v3 : v2);
                }
            }
        }
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i + 1; j < dim_; ++j)
                for (double si : {1.0, -1.0})
                    for (double sj : {1.0, -1.0}) {
                        std::fill(off.begin(), off.end(), 0.0);
                        off[i] = si * l4;
                        off[j] = sj * l4;
                        push(off, w4, v4);
                    }
        const std::size_t corners = std::size_t{1} << dim_;
        for (std::size_t mask = 0; mask < corners; ++mask) {
            for (std::size_t i = 0; i < dim_; ++i) off[i] = (mask >> i & 1) ? -l5 : l5;
            push(off, w5, 0.0);
        }
    }

    void build_kronrod() {
        static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                          0.207784955007898467600689403773245, 0.0};
        static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                          0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                         0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
        // centre first so that vals[0] is the midpoint as for the multi-dimensional rule
        push({0.0}, wgk[7] / 2, wg[3] / 2);
        for (int k = 0; k < 7; ++k) {
            const double wl = (k % 2 == 1) ? wg[k / 2] / 2 : 0.0;
            push({xgk[k]}, wgk[k] / 2, wl);
            push({-xgk[k]}, wgk[k] / 2, wl);
        }
    }

    std::size_t dim_;
    std::vector<double> offsets_;
    std::vector<double> w_high_, w_low_;
};

template <class F>
void run_parallel(std::size_t count, unsigned workers, F&& task) {
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += nthreads) {
                try {
                    task(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct BoxEstimate {
    std::vector<double> value, error;
    std::size_t axis = 0;
};

template <class F>
void estimate_box(const EmbeddedRule& rule, F& f, std::size_t ncomp, const double* center, const double* half,
                  BoxEstimate& out, std::vector<double>& vals, std::vector<double>& x) {
    const std::size_t dim = rule.dim(), np = rule.points();
    vals.resize(np * ncomp);
    x.resize(dim);
    for (std::size_t k = 0; k < np; ++k) {
        const double* off = rule.offset(k);
        for (std::size_t i = 0; i < dim; ++i) x[i] = center[i] + half[i] * off[i];
        f(x.data(), vals.data() + k * ncomp);
    }
    out.value.resize(ncomp);
    out.error.resize(ncomp);
    out.axis = rule.apply(vals.data(), ncomp, half, out.value.data(), out.error.data());
}

}  // namespace detail

// Adaptive cubature of a vector-valued integrand over the box [lo, hi].
// f(const double* x, double* out) writes ncomp values. The result is bit-identical for any
// worker count: the split schedule depends only on the estimates, and leaves are summed in
// creation order.
template <class F>
CubatureResult cubature(F&& f, const std::vector<double>& lo, const std::vector<double>& hi, std::size_t ncomp,
                        const CubatureOptions& opt) {
    const std::size_t dim = lo.size();
    if (dim == 0 || hi.size() != dim) throw std::invalid_argument("cubature: bad box");
    if (ncomp == 0) throw std::invalid_argument("cubature: no components");
    if (!(opt.rel_tol > 0.0) && !(opt.abs_tol > 0.0)) throw std::invalid_argument("cubature: tolerance must be positive");
    const detail::EmbeddedRule rule(dim);
    const std::size_t np = rule.points();

    std::vector<double> centers, halves, values, errors, priority;
    std::vector<std::size_t> axis;

    const unsigned workers = std::max(1u, opt.workers);
    std::vector<std::vector<double>> vals_buf(workers), x_buf(workers);

    auto evaluate = [&](const std::vector<double>& c, const std::vector<double>& h, std::size_t count,
                        std::vector<detail::BoxEstimate>& est) {
        est.resize(count);
        detail::run_parallel(count, workers, [&](std::size_t i) {
            const unsigned slot = static_cast<unsigned>(i % workers);
            detail::estimate_box(rule, f, ncomp, c.data() + i * dim, h.data() + i * dim, est[i], vals_buf[slot],
                                 x_buf[slot]);
        });
    };

    // initial grid
    const std::size_t div = std::max<std::size_t>(1, opt.initial_divisions);
    std::size_t ninit = 1;
    for (std::size_t i = 0; i < dim; ++i) ninit *= div;
    std::vector<double> c0(ninit * dim), h0(ninit * dim);
    for (std::size_t b = 0; b < ninit; ++b) {
        std::size_t rem = b;
        for (std::size_t i = 0; i < dim; ++i) {
            const std::size_t k = rem % div;
            rem /= div;
            const double w = (hi[i] - lo[i]) / static_cast<double>(div);
            c0[b * dim + i] = lo[i] + (static_cast<double>(k) + 0.5) * w;
            h0[b * dim + i] = 0.5 * w;
        }
    }
    std::vector<detail::BoxEstimate> est;
    evaluate(c0, h0, ninit, est);

    CubatureResult res;
    res.evaluations = ninit * np;
    std::vector<double> total(ncomp, 0.0), total_err(ncomp, 0.0);
    for (std::size_t b = 0; b < ninit; ++b)
        for (std::size_t c = 0; c < ncomp; ++c) {
            total[c] += est[b].value[c];
            total_err[c] += est[b].error[c];
        }

    std::vector<double> scale(ncomp, 1.0);
    if (opt.norm == ErrorNorm::Individual) {
        double big = 0.0;
        for (double v : total) big = std::max(big, std::abs(v));
        for (std::size_t c = 0; c < ncomp; ++c) {
            const double s = std::max({opt.abs_tol, opt.rel_tol * std::max(std::abs(total[c]), 1e-6 * big),
                                       std::numeric_limits<double>::min()});
            scale[c] = 1.0 / s;
        }
    }
    auto prio = [&](const detail::BoxEstimate& e) {
        double p = 0.0;
        for (std::size_t c = 0; c < ncomp; ++c) p = std::max(p, e.error[c] * scale[c]);
        return p;
    };

    using Entry = std::pair<double, std::size_t>;
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

    auto store = [&](std::size_t slot, const double* c, const double* h, const detail::BoxEstimate& e) {
        if (slot == centers.size() / dim) {
            centers.insert(centers.end(), c, c + dim);
            halves.insert(halves.end(), h, h + dim);
            values.insert(values.end(), e.value.begin(), e.value.end());
            errors.insert(errors.end(), e.error.begin(), e.error.end());
            priority.push_back(0.0);
            axis.push_back(0);
        } else {
            std::copy(c, c + dim, centers.begin() + slot * dim);
            std::copy(h, h + dim, halves.begin() + slot * dim);
            std::copy(e.value.begin(), e.value.end(), values.begin() + slot * ncomp);
            std::copy(e.error.begin(), e.error.end(), errors.begin() + slot * ncomp);
        }
        priority[slot] = prio(e);
        axis[slot] = e.axis;
        heap.push({priority[slot], slot});
    };
    for (std::size_t b = 0; b < ninit; ++b) store(b, c0.data() + b * dim, h0.data() + b * dim, est[b]);

    auto converged = [&]() {
        if (opt.norm == ErrorNorm::Max) {
            double emax = 0.0, vmax = 0.0;
            for (std::size_t c = 0; c < ncomp; ++c) {
                emax = std::max(emax, total_err[c]);
                vmax = std::max(vmax, std::abs(total[c]));
            }
            return emax <= std::max(opt.abs_tol, opt.rel_tol * vmax);
        }
        for (std::size_t c = 0; c < ncomp; ++c)
            if (total_err[c] > std::max(opt.abs_tol, opt.rel_tol * std::abs(total[c]))) return false;
        return true;
    };

    const std::size_t batch = std::max<std::size_t>(1, opt.batch);
    std::vector<double> cc, hh;
    std::vector<std::size_t> parents;
    std::size_t iterations = 0;
    while (!converged()) {
        const std::size_t nsplit = std::min(batch, heap.size());
        if (res.evaluations + 2 * nsplit * np > opt.max_evaluations) break;
        parents.clear();
        cc.assign(2 * nsplit * dim, 0.0);
        hh.assign(2 * nsplit * dim, 0.0);
        for (std::size_t k = 0; k < nsplit; ++k) {
            const std::size_t slot = heap.top().second;
            heap.pop();
            parents.push_back(slot);
            const std::size_t ax = axis[slot];
            for (std::size_t i = 0; i < dim; ++i) {
                const double c = centers[slot * dim + i], h = halves[slot * dim + i];
                for (std::size_t side = 0; side < 2; ++side) {
                    double* cp = cc.data() + (2 * k + side) * dim;
                    double* hp = hh.data() + (2 * k + side) * dim;
                    if (i == ax) {
                        hp[i] = 0.5 * h;
                        cp[i] = side == 0 ? c - 0.5 * h : c + 0.5 * h;
                    } else {
                        hp[i] = h;
                        cp[i] = c;
                    }
                }
            }
        }
        evaluate(cc, hh, 2 * nsplit, est);
        res.evaluations += 2 * nsplit * np;
        for (std::size_t k = 0; k < nsplit; ++k) {
            const std::size_t slot = parents[k];
            for (std::size_t c = 0; c < ncomp; ++c) {
                total[c] -= values[slot * ncomp + c];
                total_err[c] -= errors[slot * ncomp + c];
            }
            for (std::size_t side = 0; side < 2; ++side) {
                const auto& e = est[2 * k + side];
                for (std::size_t c = 0; c < ncomp; ++c) {
                    total[c] += e.value[c];
                    total_err[c] += e.error[c];
                }
                const std::size_t target = side == 0 ? slot : centers.size() / dim;
                store(target, cc.data() + (2 * k + side) * dim, hh.data() + (2 * k + side) * dim, e);
            }
        }
        if (++iterations % 256 == 0) {
            // refresh running sums to keep subtraction drift out of the convergence test
            std::fill(total.begin(), total.end(), 0.0);
            std::fill(total_err.begin(), total_err.end(), 0.0);
            const std::size_t nreg = centers.size() / dim;
            for (std::size_t r = 0; r < nreg; ++r)
                for (std::size_t c = 0; c < ncomp; ++c) {
                    total[c] += values[r * ncomp + c];
                    total_err[c] += errors[r * ncomp + c];
                }
        }
    }

    const std::size_t nreg = centers.size() / dim;
    res.value.assign(ncomp, 0.0);
    res.error.assign(ncomp, 0.0);
    for (std::size_t r = 0; r < nreg; ++r)
        for (std::size_t c = 0; c < ncomp; ++c) {
            res.value[c] += values[r * ncomp + c];
            res.error[c] += errors[r * ncomp + c];
        }
    total = res.value;
    total_err = res.error;
    res.converged = converged();
    res.regions = nreg;
    res.mesh.dim = dim;
    res.mesh.centers = std::move(centers);
    res.mesh.halves = std::move(halves);
    return res;
}

// Applies the embedded rule on every box of a frozen mesh and sums in mesh order.
template <class F>
CubatureResult cubature_on_mesh(F&& f, const CubatureMesh& mesh, std::size_t ncomp, unsigned workers = 1) {
    const std::size_t dim = mesh.dim, nbox = mesh.size();
    if (dim == 0 || nbox == 0) throw std::invalid_argument("cubature_on_mesh: empty mesh");
    const detail::EmbeddedRule rule(dim);
    workers = std::max(1u, workers);
    std::vector<detail::BoxEstimate> est(nbox);
    std::vector<std::vector<double>> vals_buf(workers), x_buf(workers);
    const std::size_t chunks = std::min<std::size_t>(workers, nbox);
    detail::run_parallel(chunks, workers, [&](std::size_t t) {
        for (std::size_t b = t; b < nbox; b += chunks)
            detail::estimate_box(rule, f, ncomp, mesh.centers.data() + b * dim, mesh.halves.data() + b * dim, est[b],
                                 vals_buf[t], x_buf[t]);
    });
    CubatureResult res;
    res.value.assign(ncomp, 0.0);
    res.error.assign(ncomp, 0.0);
    for (std::size_t b = 0; b < nbox; ++b)
        for (std::size_t c = 0; c < ncomp; ++c) {
            res.value[c] += est[b].value[c];
            res.error[c] += est[b].error[c];
        }
    res.evaluations = nbox * rule.points();
    res.regions = nbox;
    res.converged = true;
    res.mesh = mesh;
    return res;
}

}  // namespace abj
