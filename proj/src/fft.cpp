#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace ellreg::detail {

namespace {

// Planning is not thread safe in FFTW; execution with new arrays is.
class PlanCache {
public:
    fftw_plan get(int dim, int n, int channels, int sign) {
        const auto key = std::make_tuple(dim, n, channels, sign);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::vector<int> dims(static_cast<std::size_t>(dim), n);
        std::size_t total = static_cast<std::size_t>(channels);
        for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
        std::vector<fftw_complex> scratch(total);
        fftw_plan plan = fftw_plan_many_dft(dim, dims.data(), channels,
                                            scratch.data(), nullptr, channels, 1,
                                            scratch.data(), nullptr, channels, 1,
                                            sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

} // namespace

void fft_inplace(const GridSpec& grid, int channels, std::span<cplx> data, int sign) {
    fftw_plan plan = cache().get(grid.dim, grid.points, channels, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

} // namespace ellreg::detail
