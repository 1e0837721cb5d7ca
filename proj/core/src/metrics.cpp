#include "srehm/metrics.hpp"

#include <cmath>
#include <string>

#include "srehm/error.hpp"

namespace srehm {

ServiceTimeline::ServiceTimeline(std::vector<Segment> segments) {
    for (const auto& s : segments) add(s);
}

void ServiceTimeline::add_up(double minutes) { add({SegmentKind::Up, minutes}); }
void ServiceTimeline::add_down(double minutes) { add({SegmentKind::Down, minutes}); }

void ServiceTimeline::add(Segment s) {
    if (!(s.minutes > 0.0)) throw InvalidArgument("timeline segment durations must be positive");
    if (s.kind == SegmentKind::Up) {
        uptime_ += s.minutes;
    } else {
        downtime_ += s.minutes;
        ++failures_;
    }
    segments_.push_back(s);
}

double mtbf(double total_uptime, int num_failures) {
    return num_failures > 0 ? total_uptime / num_failures : total_uptime;
}

double mtbf(const ServiceTimeline& timeline) { return mtbf(timeline.uptime(), timeline.num_failures()); }

double mttr(double total_downtime, int num_failures) {
    return num_failures > 0 ? total_downtime / num_failures : 0.0;
}

double mttr(const ServiceTimeline& timeline) { return mttr(timeline.downtime(), timeline.num_failures()); }

double availability(double mtbf_minutes, double mttr_minutes) {
    const double total = mtbf_minutes + mttr_minutes;
    if (!(total > 0.0)) throw InvalidArgument("availability needs mtbf + mttr > 0");
    return 100.0 * mtbf_minutes / total;
}

double availability_score(double guaranteed, double offered) {
    if (!(guaranteed > 0.0)) throw InvalidArgument("guaranteed availability must be positive");
    return (guaranteed - offered) / guaranteed * 100.0;
}

double prediction_accuracy(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw InvalidArgument("prediction and actual series differ in length");
    if (predicted.empty()) return 100.0;
    double err = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) err += std::abs(predicted[i] - actual[i]);
    return 100.0 * (1.0 - err / static_cast<double>(predicted.size()));
}

double prediction_accuracy(std::span<const bool> predicted, std::span<const bool> actual) {
    if (predicted.size() != actual.size()) throw InvalidArgument("prediction and actual flags differ in length");
    if (predicted.empty()) return 100.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == actual[i] ? 1 : 0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(predicted.size());
}

void MetricsAccumulator::add_failure(double downtime_minutes) {
    ++failures_;
    downtime_ += downtime_minutes;
}

void MetricsAccumulator::add_prediction(bool predicted, bool realized) {
    ++predictions_;
    if (predicted == realized) ++correct_predictions_;
}

void MetricsAccumulator::add_slot(double power, double utilization_fraction, long overloads, long migrations) {
    ++slots_;
    power_sum_ += power;
    utilization_sum_ += utilization_fraction;
    overloads_ += overloads;
    migrations_ += migrations;
}

SlotMetrics MetricsAccumulator::snapshot(double v_fp, double t) const {
    SlotMetrics m;
    m.v_fp = v_fp;
    m.t = t;
    const double up = uptime();
    m.mtbf = mtbf(up, failures_);
    m.mttr = mttr(downtime_, failures_);
    m.availability = failures_ == 0 || m.mtbf + m.mttr <= 0.0 ? 100.0 : availability(m.mtbf, m.mttr);
    m.prediction_accuracy =
        predictions_ == 0 ? 0.0 : 100.0 * static_cast<double>(correct_predictions_) / static_cast<double>(predictions_);
    m.overloads = overloads_;
    m.migrations = migrations_;
    if (slots_ > 0) {
        m.power = power_sum_ / static_cast<double>(slots_);
        m.utilization = 100.0 * utilization_sum_ / static_cast<double>(slots_);
    }
    return m;
}

}  // namespace srehm
