#pragma once

#include <mutex>

#include "mcwave/modems.hpp"

namespace mcwave::detail {

/// j^p for any integer p.
inline cplx jpow(long p) {
    switch (((p % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

class OfdmModem final : public Modem {
public:
    explicit OfdmModem(WaveformConfig cfg) : Modem(std::move(cfg)) {}
    std::size_t burst_length(std::size_t rows) const override;

protected:
    void synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const override;
    void analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const override;
};

class UfmcModem final : public Modem {
public:
    explicit UfmcModem(WaveformConfig cfg);
    std::size_t burst_length(std::size_t rows) const override;

protected:
    void synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const override;
    void analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const override;

private:
    std::size_t symbol_len() const { return static_cast<std::size_t>(cfg_.fft_size) + filters_.front().size() - 1; }

    std::vector<SubcarrierBlock> bands_;
    std::vector<std::vector<cplx>> filters_;  // per subband, frequency shifted
    std::vector<cplx> response_;              // F_b(k) for the band owning k, 0 if none
};

class FbmcModem final : public Modem {
public:
    explicit FbmcModem(WaveformConfig cfg);
    std::size_t burst_length(std::size_t rows) const override;

protected:
    void synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const override;
    void analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const override;

private:
    std::vector<double> g_;
};

class CfbmcModem final : public Modem {
public:
    explicit CfbmcModem(WaveformConfig cfg);
    std::size_t burst_length(std::size_t rows) const override;

protected:
    void synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const override;
    void analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const override;

private:
    // shifted_[h][n] = g_c[(n - h N/2) mod KN] for real half h in [0, 2K)
    std::vector<std::vector<double>> shifted_;
};

class GfdmModem final : public Modem {
public:
    explicit GfdmModem(WaveformConfig cfg);
    std::size_t burst_length(std::size_t rows) const override;

protected:
    void synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const override;
    void analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const override;

private:
    const GfdmBasis& basis() const;

    // shifted_[m][n] = g_c[(n - m N) mod KN]
    std::vector<std::vector<double>> shifted_;
    mutable std::once_flag basis_once_;
    mutable std::shared_ptr<const GfdmBasis> basis_;
};

}  // namespace mcwave::detail
