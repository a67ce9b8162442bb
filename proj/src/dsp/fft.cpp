#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "mcwave/dsp.hpp"

namespace mcwave::dsp {
namespace {

static_assert(sizeof(cplx) == sizeof(fftw_complex));

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find({n, sign});
        if (it != plans_.end()) return it->second;
        // FFTW_UNALIGNED so the plan can be reused on arbitrary vectors via
        // fftw_execute_dft; FFTW_ESTIMATE keeps the plan choice reproducible.
        auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
        auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (plan == nullptr) throw NumericalError("FFTW could not create a plan");
        plans_.emplace(std::pair{n, sign}, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void run(std::span<const cplx> in, std::span<cplx> out, int sign) {
    if (in.size() != out.size()) throw InvalidArgument("dft: input and output sizes differ");
    if (in.empty()) return;
    fftw_plan plan = cache().get(static_cast<int>(in.size()), sign);
    if (in.data() == out.data()) {
        std::vector<cplx> tmp(in.begin(), in.end());
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
        return;
    }
    // Out-of-place complex plans leave the input intact.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void dft(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_FORWARD); }
void idft(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_BACKWARD); }

}  // namespace mcwave::dsp
