#include "dft.hpp"

#include <fftw3.h>

#include <mutex>

#include "errors.hpp"

namespace kloostpath {

namespace {
std::mutex planner_mutex; // FFTW planning is not thread-safe
}

void inverse_dft(std::vector<std::complex<double>>& data) {
    if (data.empty()) return;
    if (data.size() > (1u << 26))
        throw UsageError("DFT sweep size exceeds the supported limit");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf,
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
}

} // namespace kloostpath
