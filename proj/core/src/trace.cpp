#include "srehm/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "srehm/error.hpp"

namespace srehm {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, std::string_view column, std::size_t line) {
    T value{};
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end) {
        throw TraceError("column '" + std::string(column) + "' is not numeric: '" + std::string(field) + "'", line);
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw TraceError("column '" + std::string(column) + "' is not finite", line);
        }
    }
    return value;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

}  // namespace

UsageTrace UsageTrace::from_rows(std::vector<TraceRow> rows, double slot_minutes) {
    if (!(slot_minutes > 0.0)) throw TraceError("slot length must be positive");
    std::sort(rows.begin(), rows.end(),
              [](const TraceRow& a, const TraceRow& b) { return std::tie(a.vm_id, a.slot) < std::tie(b.vm_id, b.slot); });
    UsageTrace trace(slot_minutes);
    for (const auto& r : rows) {
        if (r.slot < 0) throw TraceError("negative slot index for VM " + std::to_string(r.vm_id));
        if (!(r.cpu >= 0.0 && r.cpu <= 1.0 && r.mem >= 0.0 && r.mem <= 1.0)) {
            throw TraceError("fractions for VM " + std::to_string(r.vm_id) + " outside [0,1]");
        }
        auto [it, fresh] = trace.series_.try_emplace(r.vm_id);
        Series& s = it->second;
        if (fresh) {
            s.first_slot = r.slot;
        } else if (r.slot != s.first_slot + static_cast<long>(s.values.size())) {
            throw TraceError("slots of VM " + std::to_string(r.vm_id) + " are not contiguous at slot " +
                             std::to_string(r.slot));
        }
        s.values.push_back({r.cpu, r.mem});
    }
    return trace;
}

const UsageTrace::Series& UsageTrace::of(int vm_id) const {
    auto it = series_.find(vm_id);
    if (it == series_.end()) throw TraceError("trace has no series for VM " + std::to_string(vm_id));
    return it->second;
}

std::size_t UsageTrace::row_count() const {
    std::size_t n = 0;
    for (const auto& [id, s] : series_) n += s.values.size();
    return n;
}

std::vector<TraceRow> UsageTrace::rows() const {
    std::vector<TraceRow> out;
    out.reserve(row_count());
    for (const auto& [id, s] : series_) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            out.push_back({s.first_slot + static_cast<long>(i), id, s.values[i].cpu, s.values[i].mem});
        }
    }
    return out;
}

std::vector<ResourceVector> UsageTrace::window(int vm_id, std::size_t n_slots) const {
    const Series& s = of(vm_id);
    const long last = s.first_slot + static_cast<long>(s.values.size());
    if (s.first_slot > 0 || last < static_cast<long>(n_slots)) {
        throw TraceError("trace for VM " + std::to_string(vm_id) + " does not cover slots 0.." +
                         std::to_string(n_slots == 0 ? 0 : n_slots - 1));
    }
    const auto off = static_cast<std::size_t>(-s.first_slot);
    return {s.values.begin() + static_cast<std::ptrdiff_t>(off),
            s.values.begin() + static_cast<std::ptrdiff_t>(off + n_slots)};
}

bool operator==(const UsageTrace& a, const UsageTrace& b) {
    if (a.slot_minutes_ != b.slot_minutes_ || a.series_.size() != b.series_.size()) return false;
    for (const auto& [id, s] : a.series_) {
        auto it = b.series_.find(id);
        if (it == b.series_.end() || it->second.first_slot != s.first_slot || it->second.values != s.values) {
            return false;
        }
    }
    return true;
}

TraceLoadResult parse_trace(std::istream& in, double slot_minutes) {
    std::string line;
    std::size_t line_no = 0;
    // Skip blank lines before the header.
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw TraceError("trace is empty; expected header slot,vm_id,cpu,mem", line_no);

    const auto header = split(line);
    std::array<int, 4> col{-1, -1, -1, -1};
    constexpr std::array<std::string_view, 4> kNames{"slot", "vm_id", "cpu", "mem"};
    for (std::size_t i = 0; i < header.size(); ++i) {
        for (std::size_t k = 0; k < kNames.size(); ++k) {
            if (header[i] == kNames[k]) {
                if (col[k] != -1) throw TraceError("duplicate column '" + std::string(kNames[k]) + "'", line_no);
                col[k] = static_cast<int>(i);
            }
        }
    }
    for (std::size_t k = 0; k < kNames.size(); ++k) {
        if (col[k] == -1) throw TraceError("missing column '" + std::string(kNames[k]) + "'", line_no);
    }

    TraceLoadResult result;
    std::vector<TraceRow> rows;
    auto clamp_fraction = [&](double v) {
        if (v < 0.0 || v > 1.0) {
            ++result.clamped;
            return std::clamp(v, 0.0, 1.0);
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size()) {
            throw TraceError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        TraceRow r;
        r.slot = parse_number<long>(fields[static_cast<std::size_t>(col[0])], kNames[0], line_no);
        r.vm_id = parse_number<int>(fields[static_cast<std::size_t>(col[1])], kNames[1], line_no);
        r.cpu = clamp_fraction(parse_number<double>(fields[static_cast<std::size_t>(col[2])], kNames[2], line_no));
        r.mem = clamp_fraction(parse_number<double>(fields[static_cast<std::size_t>(col[3])], kNames[3], line_no));
        if (r.slot < 0) throw TraceError("negative slot index", line_no);
        if (r.vm_id < 0) throw TraceError("negative vm_id", line_no);
        rows.push_back(r);
    }
    result.trace = UsageTrace::from_rows(std::move(rows), slot_minutes);
    return result;
}

TraceLoadResult load_trace(const std::string& path, double slot_minutes) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open trace file '" + path + "'");
    return parse_trace(in, slot_minutes);
}

void write_trace(std::ostream& out, const UsageTrace& trace) {
    out << "slot,vm_id,cpu,mem\n";
    for (const auto& r : trace.rows()) {
        out << r.slot << ',' << r.vm_id << ',' << format_double(r.cpu) << ',' << format_double(r.mem) << '\n';
    }
}

void save_trace(const std::string& path, const UsageTrace& trace) {
    std::ofstream out(path);
    if (!out) throw TraceError("cannot write trace file '" + path + "'");
    write_trace(out, trace);
}

std::string_view to_string(TracePattern p) {
    switch (p) {
        case TracePattern::Flat: return "flat";
        case TracePattern::Diurnal: return "diurnal";
        case TracePattern::Bursty: return "bursty";
    }
    return "?";
}

TracePattern parse_trace_pattern(std::string_view name) {
    if (name == "flat") return TracePattern::Flat;
    if (name == "diurnal") return TracePattern::Diurnal;
    if (name == "bursty") return TracePattern::Bursty;
    throw InvalidArgument("unknown trace pattern '" + std::string(name) + "' (flat, diurnal, bursty)");
}

UsageTrace synth_trace(std::uint64_t seed, std::size_t n_vms, std::size_t n_slots, TracePattern pattern,
                       const SynthOptions& options) {
    if (n_vms == 0 || n_slots == 0) throw InvalidArgument("synthetic trace needs at least one VM and one slot");
    if (!(options.base >= 0.0 && options.base <= 1.0)) throw InvalidArgument("trace base must lie in [0,1]");
    if (options.period_slots < 1) throw InvalidArgument("diurnal period must be >= 1 slot");

    std::vector<TraceRow> rows;
    rows.reserve(n_vms * n_slots);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t v = 0; v < n_vms; ++v) {
        // One stream per VM, so a VM's series does not depend on how many VMs there are.
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + v + 1);
        const double phase = unit(rng) * options.period_slots;
        for (std::size_t s = 0; s < n_slots; ++s) {
            double cpu = options.base;
            double mem = options.base;
            switch (pattern) {
                case TracePattern::Flat: break;
                case TracePattern::Diurnal: {
                    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(s) + phase) / options.period_slots;
                    cpu += options.amplitude * std::sin(angle) + options.noise * (2.0 * unit(rng) - 1.0);
                    mem += 0.5 * options.amplitude * std::sin(angle) + options.noise * (2.0 * unit(rng) - 1.0);
                    break;
                }
                case TracePattern::Bursty: {
                    const double draw = unit(rng);
                    const double level = options.spike_min + (1.0 - options.spike_min) * unit(rng);
                    if (draw < options.spike_probability) {
                        cpu = std::max(cpu, level);
                        mem = std::max(mem, level);
                    }
                    break;
                }
            }
            rows.push_back({static_cast<long>(s), static_cast<int>(v), std::clamp(cpu, 0.0, 1.0),
                            std::clamp(mem, 0.0, 1.0)});
        }
    }
    return UsageTrace::from_rows(std::move(rows), options.slot_minutes);
}

}  // namespace srehm
