#ifndef SREHM_METRICS_HPP
#define SREHM_METRICS_HPP

#include <span>
#include <vector>

namespace srehm {

/// Per-failure repair downtime of a VM recovered by its HA strategy, in minutes.
inline constexpr double kProtectedRepairMinutes = 0.21;
/// Default observation window {t1, t2} in minutes.
inline constexpr double kDefaultObservationMinutes = 100.0;

enum class SegmentKind { Up, Down };

struct Segment {
    SegmentKind kind = SegmentKind::Up;
    double minutes = 0.0;
};

/// Uptime/outage history of a service over an observation interval.
class ServiceTimeline {
public:
    ServiceTimeline() = default;
    /// Throws InvalidArgument on a non-positive duration.
    explicit ServiceTimeline(std::vector<Segment> segments);

    void add_up(double minutes);
    void add_down(double minutes);

    const std::vector<Segment>& segments() const { return segments_; }
    int num_failures() const { return failures_; }
    double uptime() const { return uptime_; }
    double downtime() const { return downtime_; }

private:
    void add(Segment s);

    std::vector<Segment> segments_;
    int failures_ = 0;
    double uptime_ = 0.0;
    double downtime_ = 0.0;
};

/// Total uptime per failure; the whole uptime when there was no failure.
double mtbf(const ServiceTimeline& timeline);
double mtbf(double total_uptime, int num_failures);

/// Total downtime per failure; 0 when there was no failure.
double mttr(const ServiceTimeline& timeline);
double mttr(double total_downtime, int num_failures);

/// 100 * mtbf / (mtbf + mttr). Throws InvalidArgument when both are zero.
double availability(double mtbf, double mttr);

/// (guaranteed - offered) / guaranteed * 100; negative when the SLA is over-delivered.
/// Throws InvalidArgument for guaranteed <= 0.
double availability_score(double guaranteed, double offered);

/// 100 * (1 - mean absolute error). Throws InvalidArgument on a length mismatch.
double prediction_accuracy(std::span<const double> predicted, std::span<const double> actual);

/// Percentage of positions where the predicted flag equals the realized flag.
double prediction_accuracy(std::span<const bool> predicted, std::span<const bool> actual);

/// One row of the run report.
struct SlotMetrics {
    double v_fp = 0.0;           // percent of failure-prone VMs
    double t = 0.0;              // minutes since start
    double mttr = 0.0;           // minutes
    double mtbf = 0.0;           // minutes
    double availability = 100.0; // percent
    double prediction_accuracy = 0.0;  // percent
    long overloads = 0;
    double power = 0.0;          // watts
    double utilization = 0.0;    // percent
    long migrations = 0;
};

/// Cumulative accumulator behind the report rows.
class MetricsAccumulator {
public:
    void add_service_minutes(double minutes) { service_minutes_ += minutes; }
    void add_failure(double downtime_minutes);
    /// Outage time that belongs to an already counted failure.
    void add_downtime(double minutes) { downtime_ += minutes; }
    void add_prediction(bool predicted, bool realized);
    void add_slot(double power, double utilization_fraction, long overloads, long migrations);

    SlotMetrics snapshot(double v_fp, double t) const;

    int failures() const { return failures_; }
    double downtime() const { return downtime_; }
    double uptime() const { return service_minutes_ - downtime_; }

private:
    double service_minutes_ = 0.0;
    double downtime_ = 0.0;
    int failures_ = 0;
    long predictions_ = 0;
    long correct_predictions_ = 0;
    long slots_ = 0;
    double power_sum_ = 0.0;
    double utilization_sum_ = 0.0;
    long overloads_ = 0;
    long migrations_ = 0;
};

}  // namespace srehm

#endif  // SREHM_METRICS_HPP
