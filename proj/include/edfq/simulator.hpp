#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "edfq/measures.hpp"
#include "edfq/model_config.hpp"

namespace edfq::sim {

// Tie order at equal timestamps: Renege < ServiceEnd < Arrival. ServiceStart is
// logged, never scheduled.
enum class EventKind : int { Renege = 0, ServiceEnd = 1, Arrival = 2, ServiceStart = 3 };

std::string to_string(EventKind k);

struct Event {
  double time;
  EventKind kind;
  long customer;

  friend bool operator==(const Event&, const Event&) = default;
};

enum class CustomerStatus { InQueue, InService, Reneged, Departed };

struct Customer {
  long id = 0;  // <= 0 for initial customers
  double arrival_time = 0.0;
  double initial_lead = 0.0;
  double deadline = 0.0;
  CustomerStatus status = CustomerStatus::InQueue;
  std::optional<double> service_start;

  double lead_time(double t) const { return deadline - t; }
};

// Source of inter-arrival / patience / service durations in absolute time
// units (already scaled for the N-th system where applicable).
class VariateStream {
 public:
  virtual ~VariateStream() = default;
  virtual double next() = 0;
};

class FixedStream final : public VariateStream {
 public:
  explicit FixedStream(std::vector<double> values) : values_(std::move(values)) {}
  double next() override;

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
};

class LawStream final : public VariateStream {
 public:
  LawStream(DistributionSpec law, double scale, RngStream rng)
      : law_(std::move(law)), scale_(scale), rng_(rng) {}
  double next() override { return law_.sample(rng_) * scale_; }

 private:
  DistributionSpec law_;
  double scale_;
  RngStream rng_;
};

struct SimLaws {
  std::unique_ptr<VariateStream> interarrival;
  std::unique_ptr<VariateStream> patience;
  std::unique_ptr<VariateStream> service;
};

// Streams for the N-th system: inter-arrival and service shapes normalized to
// unit mean, then scaled by 1/(N*lambda) and 1/(N*mu); patience unscaled.
// Substreams are derived from params.seed with fixed tags.
SimLaws make_laws(const ModelConfig& config, const SystemParams& params);

// substream for initial-lead draws, derived from the same seed
RngStream make_initial_rng(const SystemParams& params);

struct SimOptions {
  int output_grid = 512;     // uniform intervals on [0, T]
  int snapshot_count = 32;   // measure snapshots (subset of grid times)
  long event_cap = 50'000'000;
  bool frontier_update_on_idle_arrival = true;  // D3 toggle
};

struct ServerSlot {
  Customer customer;
  double completion_time = 0.0;
};

struct SimState {
  double clock = 0.0;
  // queued customers keyed by (deadline, id); begin() is the head of the line
  std::map<std::pair<double, long>, Customer> queue;
  std::optional<ServerSlot> server;
  long arrivals = 0;
  long departures = 0;
  long reneged = 0;
  long initial_count = 0;
  double frontier_sup = 0.0;  // F(t) = frontier_sup - t
  double next_arrival_time = 0.0;
  long next_id = 1;
  std::vector<double> all_deadlines;  // every initial + arrived customer

  long in_system() const { return static_cast<long>(queue.size()) + (server ? 1 : 0); }
  long queue_length() const { return static_cast<long>(queue.size()); }
  double head_deadline() const { return queue.begin()->first.first; }
};

struct SnapshotRow {
  double time = 0.0;
  FiniteMeasure queue_scaled = FiniteMeasure::zero();      // Q^N_t / N
  FiniteMeasure potential_scaled = FiniteMeasure::zero();  // H^N_t / N
  double cf_mass_scaled = 0.0;                             // Q^N_t[C(t), F(t)] / N
};

struct SimTrace {
  std::vector<Event> events;
  std::vector<double> grid;
  std::vector<double> q_scaled;   // Q/N
  std::vector<double> r_scaled;   // R/N
  std::vector<double> x_scaled;   // X/N
  std::vector<double> frontier;   // F
  std::vector<double> current;    // C
  std::vector<double> head_lead;  // Z
  std::vector<SnapshotRow> snapshots;
  double busy_time = 0.0;
  long arrivals = 0;
  long departures = 0;
  long reneged = 0;
  std::optional<double> first_empty_time;  // first t with Q(t) = 0

  double sup_frontier() const;
  MeasurePath queue_measure_path() const;
  MeasurePath potential_measure_path() const;
};

// floor(N * Q0 mass) customers with i.i.d. leads from the normalized initial
// measure, resampling draws that land in [0, frontier0]; all start in the
// queue and run() moves the earliest-deadline one into service at t = 0.
SimState build_initial_state(const InitialCondition& ic, const SystemParams& params,
                             RngStream& rng);

SimTrace run(SimState state, const SystemParams& params, SimLaws& laws,
             const SimOptions& options = {});

// point masses at lead times of queued customers, unit weights (unscaled)
FiniteMeasure snapshot_queue_measure(const SimState& state);

// point masses at positive lead times of all initial + arrived customers,
// services ignored (the serverless system)
FiniteMeasure snapshot_potential_measure(const std::vector<double>& all_deadlines, double t);

// F(t) on the trace grid, reconstructed from the event-log/state convention
// F(t) = frontier_sup(at last event <= t) - t; kept as the recorded path
const std::vector<double>& frontier_path(const SimTrace& trace);

}  // namespace edfq::sim
