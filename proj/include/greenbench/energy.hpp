#pragma once

/**
 * Energy measurement for benchmark windows.
 *
 * Three providers feed the same EnergyReading shape: trapezoidal integration
 * of a power trace, deltas of a cumulative microjoule counter (with single
 * wraparound handling), and a configured constant-power fallback.
 */

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace greenbench {

struct PowerSample {
  std::int64_t timestamp_ms = 0;
  double watts = 0.0;
};

enum class EnergyProviderKind { CounterFile, ConstantPower, TraceReplay };

std::string to_string(EnergyProviderKind kind);
EnergyProviderKind provider_kind_from_string(const std::string &name);

struct EnergyReading {
  double joules = 0.0;
  double kwh = 0.0; // always joules / 3.6e6
  EnergyProviderKind provider = EnergyProviderKind::ConstantPower;
  std::int64_t window_ms = 0;
};

struct CounterRead {
  std::uint64_t microjoules = 0;
  std::uint64_t max_range_uj = 0;
};

EnergyReading integrate_trace(const std::vector<PowerSample> &samples);
double counter_delta_joules(const CounterRead &before, const CounterRead &after);
EnergyReading constant_power_energy(double watts, std::int64_t duration_ms);

// CSV with header `timestamp_ms,watts`, monotone timestamps.
std::vector<PowerSample> load_power_trace(const std::string &path);

/**
 * Start/stop lifecycle owned by one benchmark run. Completed readings are
 * immutable values.
 */
class EnergyCollector {
public:
  virtual ~EnergyCollector() = default;
  virtual void start() = 0;
  virtual EnergyReading stop() = 0;
  virtual std::string description() const = 0;

  // Trace replay supplies its own timeline; live providers use the clock.
  virtual bool deterministic_timeline() const { return false; }
  virtual std::int64_t replay_start_ms() const { return 0; }
  virtual std::int64_t replay_end_ms() const { return 0; }
};

std::unique_ptr<EnergyCollector> make_constant_power_collector(double watts);
std::unique_ptr<EnergyCollector> make_trace_replay_collector(std::vector<PowerSample> trace);

// Samples the counter file at `cadence_ms` so at most one wraparound can
// occur between consecutive reads.
std::unique_ptr<EnergyCollector> make_counter_file_collector(std::string path,
                                                             std::uint64_t max_range_uj,
                                                             std::int64_t cadence_ms = 100);

} // namespace greenbench
