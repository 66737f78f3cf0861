#include "edfq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edfq/errors.hpp"
#include "edfq/numerics.hpp"

namespace edfq::sim {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Renege: return "renege";
    case EventKind::ServiceEnd: return "service_end";
    case EventKind::Arrival: return "arrival";
    case EventKind::ServiceStart: return "service_start";
  }
  return "?";
}

double FixedStream::next() {
  if (pos_ >= values_.size()) throw std::out_of_range("fixed stream exhausted");
  return values_[pos_++];
}

namespace {
constexpr std::uint64_t kTagInitial = 101;
constexpr std::uint64_t kTagArrival = 102;
constexpr std::uint64_t kTagPatience = 103;
constexpr std::uint64_t kTagService = 104;
}  // namespace

SimLaws make_laws(const ModelConfig& config, const SystemParams& params) {
  const double n = static_cast<double>(params.n_scale);
  SimLaws laws;
  laws.interarrival = std::make_unique<LawStream>(
      config.arrival_law, 1.0 / (config.arrival_law.mean() * n * params.lambda),
      RngStream(params.seed, kTagArrival));
  laws.patience = std::make_unique<LawStream>(config.patience_law, 1.0,
                                              RngStream(params.seed, kTagPatience));
  laws.service = std::make_unique<LawStream>(
      config.service_law, 1.0 / (config.service_law.mean() * n * params.mu),
      RngStream(params.seed, kTagService));
  return laws;
}

RngStream make_initial_rng(const SystemParams& params) {
  return RngStream(params.seed, kTagInitial);
}

SimState build_initial_state(const InitialCondition& ic, const SystemParams& params,
                             RngStream& rng) {
  ic.validate();
  params.validate();
  SimState state;
  state.frontier_sup = ic.frontier0;

  const double mass = ic.mass();
  const long count = static_cast<long>(std::floor(static_cast<double>(params.n_scale) * mass));
  if (mass <= 0.0 && params.regime() != Regime::Subcritical)
    throw EmptyInitialMeasure("zero-mass initial measure requires the subcritical regime");

  state.initial_count = count;
  state.all_deadlines.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    Customer c;
    c.id = -count + 1 + i;
    c.arrival_time = 0.0;
    double lead = 0.0;
    int attempts = 0;
    do {
      lead = ic.q0.quantile(rng.uniform01());
      if (++attempts > 1000)
        throw EmptyInitialMeasure("initial measure support appears confined to [0, frontier0]");
    } while (lead <= ic.frontier0);
    c.initial_lead = lead;
    c.deadline = lead;  // arrival at time 0
    state.queue.emplace(std::make_pair(c.deadline, c.id), c);
    state.all_deadlines.push_back(c.deadline);
  }
  return state;
}

FiniteMeasure snapshot_queue_measure(const SimState& state) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(state.queue.size());
  for (const auto& [key, c] : state.queue) atoms.emplace_back(c.deadline - state.clock, 1.0);
  return FiniteMeasure::point_masses(std::move(atoms));
}

FiniteMeasure snapshot_potential_measure(const std::vector<double>& all_deadlines, double t) {
  std::vector<std::pair<double, double>> atoms;
  for (double d : all_deadlines) {
    if (d - t > 0.0) atoms.emplace_back(d - t, 1.0);
  }
  return FiniteMeasure::point_masses(std::move(atoms));
}

const std::vector<double>& frontier_path(const SimTrace& trace) { return trace.frontier; }

double SimTrace::sup_frontier() const {
  double s = -num::kInf;
  for (double f : frontier) s = std::max(s, f);
  return s;
}

MeasurePath SimTrace::queue_measure_path() const {
  MeasurePath path;
  for (const SnapshotRow& row : snapshots) {
    path.times.push_back(row.time);
    path.measures.push_back(row.queue_scaled);
  }
  return path;
}

MeasurePath SimTrace::potential_measure_path() const {
  MeasurePath path;
  for (const SnapshotRow& row : snapshots) {
    path.times.push_back(row.time);
    path.measures.push_back(row.potential_scaled);
  }
  return path;
}

namespace {

struct GridSampler {
  const SystemParams& params;
  const SimOptions& options;
  SimTrace& trace;
  const SimState& state;
  std::size_t next_index = 0;
  std::size_t snap_stride;

  GridSampler(const SystemParams& p, const SimOptions& o, SimTrace& tr, const SimState& st)
      : params(p), options(o), trace(tr), state(st) {
    const int n = std::max(1, options.output_grid);
    trace.grid.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j)
      trace.grid[static_cast<std::size_t>(j)] = params.horizon * j / n;
    const int snaps = std::max(2, std::min(options.snapshot_count, n + 1));
    snap_stride = static_cast<std::size_t>(n) / static_cast<std::size_t>(snaps - 1);
    if (snap_stride == 0) snap_stride = 1;
  }

  // record every grid time strictly before `upto` with the current state
  void flush_before(double upto) {
    while (next_index < trace.grid.size() && trace.grid[next_index] < upto) {
      sample(trace.grid[next_index]);
      ++next_index;
    }
  }

  void flush_all() { flush_before(std::numeric_limits<double>::infinity()); }

  void sample(double t) {
    const double n = static_cast<double>(params.n_scale);
    const long q = state.queue_length();
    const double f = state.frontier_sup - t;
    const double z = q > 0 ? state.head_deadline() - t : 0.0;
    const double c = q > 0 ? z : f;
    trace.q_scaled.push_back(static_cast<double>(q) / n);
    trace.r_scaled.push_back(static_cast<double>(state.reneged) / n);
    trace.x_scaled.push_back(static_cast<double>(state.in_system()) / n);
    trace.frontier.push_back(f);
    trace.current.push_back(c);
    trace.head_lead.push_back(z);
    if (next_index % snap_stride == 0 || next_index + 1 == trace.grid.size()) {
      SnapshotRow row;
      row.time = t;
      row.queue_scaled = snapshot_queue_measure(state).scaled(1.0 / n);
      row.potential_scaled = snapshot_potential_measure(state.all_deadlines, t).scaled(1.0 / n);
      double cf = 0.0;
      for (const auto& [key, cust] : state.queue) {
        const double lead = cust.deadline - t;
        if (lead >= c && lead <= f) cf += 1.0;
      }
      row.cf_mass_scaled = cf / n;
      trace.snapshots.push_back(std::move(row));
    }
  }
};

}  // namespace

SimTrace run(SimState state, const SystemParams& params, SimLaws& laws,
             const SimOptions& options) {
  params.validate();
  SimTrace trace;
  GridSampler sampler(params, options, trace, state);

  auto note_head = [&] {
    if (!state.queue.empty())
      state.frontier_sup = std::max(state.frontier_sup, state.head_deadline());
  };

  auto start_service = [&](Customer c, double t) {
    c.status = CustomerStatus::InService;
    c.service_start = t;
    const double duration = laws.service->next();
    state.server = ServerSlot{c, t + duration};
    trace.events.push_back({t, EventKind::ServiceStart, c.id});
  };

  // non-idling: an idle server takes the head of the line immediately
  auto repair_nonidling = [&](double t) {
    if (!state.server && !state.queue.empty()) {
      auto head = state.queue.begin();
      Customer c = head->second;
      state.queue.erase(head);
      start_service(std::move(c), t);
      note_head();
    }
  };

  state.clock = 0.0;
  state.next_arrival_time = laws.interarrival->next();
  repair_nonidling(0.0);
  note_head();
  if (state.queue_length() == 0) trace.first_empty_time = 0.0;

  long event_count = 0;
  double prev_clock = 0.0;
  const double horizon = params.horizon;

  while (true) {
    const double t_renege = state.queue.empty() ? num::kInf : state.head_deadline();
    const double t_service = state.server ? state.server->completion_time : num::kInf;
    const double t_arrival = state.next_arrival_time;

    // ties resolve in declaration order: Renege, then ServiceEnd, then Arrival
    double te = t_renege;
    EventKind kind = EventKind::Renege;
    if (t_service < te) {
      te = t_service;
      kind = EventKind::ServiceEnd;
    }
    if (t_arrival < te) {
      te = t_arrival;
      kind = EventKind::Arrival;
    }

    if (te > horizon || !std::isfinite(te)) break;
    if (++event_count > options.event_cap)
      throw EventOverflow("more than " + std::to_string(options.event_cap) + " events");

    sampler.flush_before(te);
    if (state.server) trace.busy_time += te - prev_clock;
    prev_clock = te;
    state.clock = te;

    switch (kind) {
      case EventKind::Renege: {
        auto head = state.queue.begin();
        Customer c = head->second;
        state.queue.erase(head);
        c.status = CustomerStatus::Reneged;
        ++state.reneged;
        trace.events.push_back({te, EventKind::Renege, c.id});
        break;
      }
      case EventKind::ServiceEnd: {
        trace.events.push_back({te, EventKind::ServiceEnd, state.server->customer.id});
        ++state.departures;
        state.server.reset();
        repair_nonidling(te);
        break;
      }
      case EventKind::Arrival: {
        ++state.arrivals;
        Customer c;
        c.id = state.next_id++;
        c.arrival_time = te;
        c.initial_lead = laws.patience->next();
        c.deadline = te + c.initial_lead;
        state.all_deadlines.push_back(c.deadline);
        trace.events.push_back({te, EventKind::Arrival, c.id});
        if (!state.server) {
          // bypasses the queue; instantaneously head of the line (D3)
          if (options.frontier_update_on_idle_arrival)
            state.frontier_sup = std::max(state.frontier_sup, c.deadline);
          start_service(std::move(c), te);
        } else {
          state.queue.emplace(std::make_pair(c.deadline, c.id), std::move(c));
        }
        state.next_arrival_time = te + laws.interarrival->next();
        break;
      }
      case EventKind::ServiceStart:
        break;  // never scheduled
    }

    note_head();
    if (!trace.first_empty_time && state.queue_length() == 0) trace.first_empty_time = te;
  }

  if (state.server && horizon > prev_clock) trace.busy_time += horizon - prev_clock;
  state.clock = horizon;
  sampler.flush_all();

  trace.arrivals = state.arrivals;
  trace.departures = state.departures;
  trace.reneged = state.reneged;
  return trace;
}

}  // namespace edfq::sim
