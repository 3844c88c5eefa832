#include "greenbench/energy.hpp"

#include "greenbench/errors.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace greenbench {

namespace {

constexpr double kJoulesPerKwh = 3.6e6;

EnergyReading make_reading(double joules, EnergyProviderKind kind, std::int64_t window_ms) {
  EnergyReading r;
  r.joules = joules;
  r.kwh = joules / kJoulesPerKwh;
  r.provider = kind;
  r.window_ms = window_ms;
  return r;
}

std::int64_t steady_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

} // namespace

std::string to_string(EnergyProviderKind kind) {
  switch (kind) {
  case EnergyProviderKind::CounterFile:
    return "counter-file";
  case EnergyProviderKind::ConstantPower:
    return "constant-power";
  case EnergyProviderKind::TraceReplay:
    return "trace-replay";
  }
  return "unknown";
}

EnergyProviderKind provider_kind_from_string(const std::string &name) {
  if (name == "counter-file") {
    return EnergyProviderKind::CounterFile;
  }
  if (name == "constant-power") {
    return EnergyProviderKind::ConstantPower;
  }
  if (name == "trace-replay") {
    return EnergyProviderKind::TraceReplay;
  }
  throw IoError("unknown energy provider: " + name);
}

EnergyReading integrate_trace(const std::vector<PowerSample> &samples) {
  if (samples.empty()) {
    throw EmptyTrace("power trace has no samples");
  }
  double joules = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto &a = samples[i - 1];
    const auto &b = samples[i];
    if (b.timestamp_ms < a.timestamp_ms) {
      throw UnsortedTrace("timestamps decrease at sample " + std::to_string(i));
    }
    if (a.watts < 0.0 || b.watts < 0.0) {
      throw NegativePower("negative watts in trace");
    }
    const double dt_s = static_cast<double>(b.timestamp_ms - a.timestamp_ms) / 1000.0;
    joules += 0.5 * (a.watts + b.watts) * dt_s;
  }
  if (samples.size() == 1 && samples.front().watts < 0.0) {
    throw NegativePower("negative watts in trace");
  }
  const std::int64_t window = samples.back().timestamp_ms - samples.front().timestamp_ms;
  return make_reading(joules, EnergyProviderKind::TraceReplay, window);
}

double counter_delta_joules(const CounterRead &before, const CounterRead &after) {
  if (before.max_range_uj == 0 || after.max_range_uj == 0) {
    throw ZeroRange("counter max_range_uj is zero");
  }
  const std::uint64_t modulus = before.max_range_uj + 1;
  std::uint64_t delta_uj;
  if (after.microjoules >= before.microjoules) {
    delta_uj = after.microjoules - before.microjoules;
  } else {
    // single wraparound
    delta_uj = modulus - before.microjoules + after.microjoules;
  }
  return static_cast<double>(delta_uj) * 1e-6;
}

EnergyReading constant_power_energy(double watts, std::int64_t duration_ms) {
  if (watts < 0.0) {
    throw NegativePower("constant power must be >= 0, got " + std::to_string(watts));
  }
  const double joules = watts * static_cast<double>(duration_ms) / 1000.0;
  return make_reading(joules, EnergyProviderKind::ConstantPower, duration_ms);
}

std::vector<PowerSample> load_power_trace(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open power trace: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError(path + ": empty trace file");
  }
  if (line.ends_with("\r")) {
    line.pop_back();
  }
  if (line != "timestamp_ms,watts") {
    throw IoError(path + ": expected header `timestamp_ms,watts`");
  }
  std::vector<PowerSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.ends_with("\r")) {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected `timestamp_ms,watts`");
    }
    PowerSample s;
    try {
      s.timestamp_ms = std::stoll(line.substr(0, comma));
      s.watts = std::stod(line.substr(comma + 1));
    } catch (const std::exception &) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed sample");
    }
    samples.push_back(s);
  }
  if (samples.empty()) {
    throw EmptyTrace(path + ": trace has no samples");
  }
  return samples;
}

namespace {

class ConstantPowerCollector final : public EnergyCollector {
public:
  explicit ConstantPowerCollector(double watts) : watts_(watts) {
    if (watts < 0.0) {
      throw NegativePower("constant power must be >= 0");
    }
  }

  void start() override { start_ms_ = steady_now_ms(); }

  EnergyReading stop() override {
    const std::int64_t duration = steady_now_ms() - start_ms_;
    return constant_power_energy(watts_, duration);
  }

  std::string description() const override {
    std::ostringstream out;
    out << "constant-power:" << watts_ << "W";
    return out.str();
  }

private:
  double watts_;
  std::int64_t start_ms_ = 0;
};

class TraceReplayCollector final : public EnergyCollector {
public:
  explicit TraceReplayCollector(std::vector<PowerSample> trace) : trace_(std::move(trace)) {
    reading_ = integrate_trace(trace_); // validates up front
  }

  void start() override {}
  EnergyReading stop() override { return reading_; }

  std::string description() const override {
    return "trace-replay:" + std::to_string(trace_.size()) + "-samples";
  }

  bool deterministic_timeline() const override { return true; }
  std::int64_t replay_start_ms() const override { return trace_.front().timestamp_ms; }
  std::int64_t replay_end_ms() const override { return trace_.back().timestamp_ms; }

private:
  std::vector<PowerSample> trace_;
  EnergyReading reading_;
};

class CounterFileCollector final : public EnergyCollector {
public:
  CounterFileCollector(std::string path, std::uint64_t max_range_uj, std::int64_t cadence_ms)
      : path_(std::move(path)), max_range_uj_(max_range_uj), cadence_ms_(cadence_ms) {
    if (max_range_uj_ == 0) {
      throw ZeroRange("counter max_range_uj is zero");
    }
  }

  ~CounterFileCollector() override {
    if (running_) {
      stop_sampler();
    }
  }

  void start() override {
    last_ = read_counter();
    accumulated_joules_ = 0.0;
    start_ms_ = steady_now_ms();
    running_ = true;
    sampler_ = std::thread([this] { sample_loop(); });
  }

  EnergyReading stop() override {
    stop_sampler();
    tick();
    const std::int64_t window = steady_now_ms() - start_ms_;
    EnergyReading r;
    r.joules = accumulated_joules_;
    r.kwh = r.joules / 3.6e6;
    r.provider = EnergyProviderKind::CounterFile;
    r.window_ms = window;
    return r;
  }

  std::string description() const override { return "counter-file:" + path_; }

private:
  CounterRead read_counter() const {
    std::ifstream in(path_);
    std::uint64_t uj = 0;
    if (!in || !(in >> uj)) {
      throw IoError("cannot read counter file: " + path_);
    }
    return CounterRead{uj, max_range_uj_};
  }

  void tick() {
    const CounterRead now = read_counter();
    accumulated_joules_ += counter_delta_joules(last_, now);
    last_ = now;
  }

  void sample_loop() {
    std::unique_lock lock(mutex_);
    while (running_) {
      cv_.wait_for(lock, std::chrono::milliseconds(cadence_ms_), [this] { return !running_; });
      if (!running_) {
        break;
      }
      tick();
    }
  }

  void stop_sampler() {
    {
      std::lock_guard lock(mutex_);
      running_ = false;
    }
    cv_.notify_all();
    if (sampler_.joinable()) {
      sampler_.join();
    }
  }

  std::string path_;
  std::uint64_t max_range_uj_;
  std::int64_t cadence_ms_;
  CounterRead last_{};
  double accumulated_joules_ = 0.0;
  std::int64_t start_ms_ = 0;
  bool running_ = false;
  std::thread sampler_;
  std::mutex mutex_;
  std::condition_variable cv_;
};

} // namespace

std::unique_ptr<EnergyCollector> make_constant_power_collector(double watts) {
  return std::make_unique<ConstantPowerCollector>(watts);
}

std::unique_ptr<EnergyCollector> make_trace_replay_collector(std::vector<PowerSample> trace) {
  return std::make_unique<TraceReplayCollector>(std::move(trace));
}

std::unique_ptr<EnergyCollector> make_counter_file_collector(std::string path,
                                                             std::uint64_t max_range_uj,
                                                             std::int64_t cadence_ms) {
  return std::make_unique<CounterFileCollector>(std::move(path), max_range_uj, cadence_ms);
}

} // namespace greenbench
