#include "thzrf/mcsim.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace thzrf::mcsim {

namespace {

struct PartitionSums {
    // conditional mode: sum of P and P^2 per scheme; symbol mode: error counts
    std::vector<double> sum, sum_sq;
    std::vector<std::int64_t> errors;
};

template <class Work>
std::vector<PartitionSums> run_partitions(const SimConfig& cfg, Work work) {
    std::vector<PartitionSums> out(cfg.partitions);
    unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(cfg.partitions));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int p = next++; p < cfg.partitions; p = next++) {
            try {
                out[p] = work(p);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

void add_flags(McResult& r) {
    // no observed errors means the error rate is below what the trial count can resolve
    if (r.aser == 0.0 || r.std_error > r.aser / 3.0) r.flags.push_back("mc_stderr_high");
}

class Detector {
public:
    explicit Detector(Constellation c) : c_(std::move(c)) {}

    // True when the symbol is received in error at instantaneous SNR l.
    bool error(int sym, double l, Rng& rng) const {
        boost::random::normal_distribution<double> noise(0.0, std::sqrt(0.5));
        const double amp = std::sqrt(l);
        if (c_.orthogonal) {
            const int m = c_.label_count;
            double best = -1.0;
            int pick = -1;
            for (int i = 0; i < m; ++i) {
                const double re = noise(rng) + (i == sym ? amp : 0.0);
                const double im = noise(rng);
                const double e = re * re + im * im;
                if (e > best) {
                    best = e;
                    pick = i;
                }
            }
            return pick != sym;
        }
        const double yr = amp * c_.points[sym].real() + noise(rng);
        const double yi = amp * c_.points[sym].imag() + noise(rng);
        double best = std::numeric_limits<double>::infinity();
        int pick = -1;
        for (int j = 0; j < static_cast<int>(c_.points.size()); ++j) {
            const double dr = yr - amp * c_.points[j].real();
            const double di = yi - amp * c_.points[j].imag();
            const double d = dr * dr + di * di;
            if (d < best) {
                best = d;
                pick = j;
            }
        }
        return pick != sym;
    }

    int size() const { return c_.label_count; }

private:
    Constellation c_;
};

std::vector<McResult> conditional(const linkstats::SnrModel& model, const std::vector<aser::ModulationScheme>& schemes,
                                  const SimConfig& cfg) {
    const std::size_t ns = schemes.size();
    const std::int64_t per = cfg.trials / cfg.partitions;
    const auto parts = run_partitions(cfg, [&](int p) {
        PartitionSums s;
        s.sum.assign(ns, 0.0);
        s.sum_sq.assign(ns, 0.0);
        Rng rng = partition_rng(cfg.seed, p);
        for (std::int64_t t = 0; t < per; ++t) {
            const auto h = draw_hop_snr(model, rng);
            const double l = std::min(h.thz, h.rf);
            for (std::size_t i = 0; i < ns; ++i) {
                const double pe = aser::conditional_ser(schemes[i], l);
                s.sum[i] += pe;
                s.sum_sq[i] += pe * pe;
            }
        }
        return s;
    });
    std::vector<McResult> out(ns);
    const double n = static_cast<double>(cfg.trials);
    for (std::size_t i = 0; i < ns; ++i) {
        double sum = 0.0, sq = 0.0;
        for (const auto& p : parts) {
            sum += p.sum[i];
            sq += p.sum_sq[i];
        }
        const double mean = sum / n;
        const double var = std::max(0.0, sq / n - mean * mean) * n / (n - 1.0);
        out[i].aser = mean;
        out[i].std_error = std::sqrt(var / n);
        out[i].trials = cfg.trials;
        add_flags(out[i]);
    }
    return out;
}

McResult symbol_level(const linkstats::SnrModel& model, const aser::ModulationScheme& scheme, const SimConfig& cfg) {
    const Detector det(build_constellation(scheme));
    const std::int64_t per = cfg.trials / cfg.partitions;
    const auto parts = run_partitions(cfg, [&](int p) {
        PartitionSums s;
        s.errors.assign(1, 0);
        Rng rng = partition_rng(cfg.seed, p);
        boost::random::uniform_int_distribution<int> pick(0, det.size() - 1);
        for (std::int64_t t = 0; t < per; ++t) {
            const auto h = draw_hop_snr(model, rng);
            const int sym = pick(rng);
            // A symbol decoded wrongly at the relay is not forwarded.
            if (det.error(sym, h.thz, rng) || det.error(sym, h.rf, rng)) ++s.errors[0];
        }
        return s;
    });
    std::int64_t errors = 0;
    for (const auto& p : parts) errors += p.errors[0];
    McResult r;
    const double n = static_cast<double>(cfg.trials);
    r.aser = static_cast<double>(errors) / n;
    r.std_error = std::sqrt(r.aser * (1.0 - r.aser) / n);
    r.trials = cfg.trials;
    add_flags(r);
    return r;
}

}  // namespace

std::vector<McResult> run_mc(const linkstats::SnrModel& model, const std::vector<aser::ModulationScheme>& schemes,
                             const SimConfig& cfg) {
    cfg.validate();
    if (cfg.mode == Mode::conditional) return conditional(model, schemes, cfg);
    std::vector<McResult> out;
    for (const auto& s : schemes) out.push_back(symbol_level(model, s, cfg));
    return out;
}

McResult run_mc(const linkstats::SnrModel& model, const aser::ModulationScheme& scheme, const SimConfig& cfg) {
    return run_mc(model, std::vector<aser::ModulationScheme>{scheme}, cfg).front();
}

}  // namespace thzrf::mcsim
