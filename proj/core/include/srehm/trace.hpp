#ifndef SREHM_TRACE_HPP
#define SREHM_TRACE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "srehm/model.hpp"

namespace srehm {

struct TraceRow {
    long slot = 0;
    int vm_id = 0;
    double cpu = 0.0;  // fraction of the VM's CPU demand
    double mem = 0.0;  // fraction of the VM's memory demand
};

/// Per-VM utilization series sampled every `slot_minutes`. Each VM covers a contiguous
/// block of slots.
class UsageTrace {
public:
    struct Series {
        long first_slot = 0;
        std::vector<ResourceVector> values;  // fractions
    };

    UsageTrace() = default;
    explicit UsageTrace(double slot_minutes) : slot_minutes_(slot_minutes) {}

    /// Validates ranges and contiguity. Throws TraceError.
    static UsageTrace from_rows(std::vector<TraceRow> rows, double slot_minutes = 5.0);

    double slot_minutes() const { return slot_minutes_; }
    const std::map<int, Series>& series() const { return series_; }
    bool contains(int vm_id) const { return series_.contains(vm_id); }
    const Series& of(int vm_id) const;
    std::size_t row_count() const;
    std::vector<TraceRow> rows() const;

    /// Fractions for `vm_id` over slots [0, n_slots). Throws TraceError if not covered.
    std::vector<ResourceVector> window(int vm_id, std::size_t n_slots) const;

    friend bool operator==(const UsageTrace& a, const UsageTrace& b);

private:
    double slot_minutes_ = 5.0;
    std::map<int, Series> series_;
};

struct TraceLoadResult {
    UsageTrace trace;
    std::size_t clamped = 0;  // out-of-range fractions pulled into [0,1]
};

/// CSV with header naming the columns slot, vm_id, cpu, mem (any order). Throws
/// TraceError with the 1-based line number on malformed rows or a schema mismatch.
TraceLoadResult parse_trace(std::istream& in, double slot_minutes = 5.0);
TraceLoadResult load_trace(const std::string& path, double slot_minutes = 5.0);

/// Writes "slot,vm_id,cpu,mem" with round-trip precision.
void write_trace(std::ostream& out, const UsageTrace& trace);
void save_trace(const std::string& path, const UsageTrace& trace);

enum class TracePattern { Flat, Diurnal, Bursty };

std::string_view to_string(TracePattern p);
/// Throws InvalidArgument for names other than flat, diurnal, bursty.
TracePattern parse_trace_pattern(std::string_view name);

struct SynthOptions {
    double base = 0.4;
    double amplitude = 0.3;        // diurnal swing around the base
    int period_slots = 288;        // diurnal period
    double noise = 0.02;           // diurnal jitter
    double spike_probability = 0.1;  // bursty
    double spike_min = 0.86;       // bursty spikes are drawn in [spike_min, 1]
    double slot_minutes = 5.0;
};

/// Deterministic synthetic trace for VM ids 0..n_vms-1 over slots 0..n_slots-1.
/// Throws InvalidArgument when n_vms or n_slots is zero.
UsageTrace synth_trace(std::uint64_t seed, std::size_t n_vms, std::size_t n_slots, TracePattern pattern,
                       const SynthOptions& options = {});

}  // namespace srehm

#endif  // SREHM_TRACE_HPP
