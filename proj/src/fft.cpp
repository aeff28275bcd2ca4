#include "sigobf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace sigobf::fft {
namespace {

// The FFTW planner is not re-entrant; plans are created once per
// (size, direction) under this lock and executed with the new-array
// interface, which is thread-safe.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        cvec in(n), out(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(out.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

cvec transform(std::span<const cplx> x, int sign)
{
    if (x.empty())
        return {};
    cvec in(x.begin(), x.end());
    cvec out(x.size());
    fftw_plan plan = cache().get(x.size(), sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

} // namespace

cvec forward(std::span<const cplx> x) { return transform(x, FFTW_FORWARD); }

cvec inverse(std::span<const cplx> x) { return transform(x, FFTW_BACKWARD); }

} // namespace sigobf::fft
