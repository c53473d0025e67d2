#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace smp {

// Seeded RNG with hand-rolled transforms.  std::normal_distribution is
// implementation-defined, so Box-Muller is done here to keep streams
// reproducible for a given seed regardless of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0,1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::vector<double> gaussian_vec(int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = gaussian();
        return v;
    }

    // uniform direction on the unit sphere in R^n
    std::vector<double> unit_vector(int n) {
        for (;;) {
            auto v = gaussian_vec(n);
            double s = 0.0;
            for (double x : v) s += x * x;
            if (s > 1e-12) {
                const double inv = 1.0 / std::sqrt(s);
                for (auto& x : v) x *= inv;
                return v;
            }
        }
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace smp
