#ifndef CDOLD_SUPPORT_HPP
#define CDOLD_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace cdold {

// Error taxonomy mirrored by the CLI exit codes.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A standing assumption or feasibility requirement does not hold.
struct AssumptionError : std::runtime_error {
    explicit AssumptionError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric routine failed to converge within its configured budget.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Neumaier compensated summation.  Used wherever long sums feed a tight
// tolerance (measure integrals, Monte Carlo partial sums).
class NeumaierSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Worker cap: CDO_LD_THREADS if set, otherwise hardware concurrency.
int worker_count();

// Runs fn(block_index, begin, end) over [0, n) split into fixed-size blocks.
// Block boundaries depend only on (n, block_size), never on the worker count,
// so per-block results reduced in block order are worker-count independent.
void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn);

// 17-significant-digit decimal rendering for CSV output.
std::string fmt_g17(double x);

}  // namespace cdold

#endif
