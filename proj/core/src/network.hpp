#pragma once

// Event-driven FCFS queueing network shared by the static simulations and
// the scripted scenario runner. Internal to the library.

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "edgeq/rng.hpp"
#include "edgeq/sampler.hpp"

namespace edgeq::detail {

inline constexpr std::size_t kMaxHops = 4;

struct StationSpec {
  std::string name;
  // AggregatedRate: one server occupied for demand / divisor; the request
  // itself leaves after its full demand.
  // DiscreteServers: `servers` parallel servers at full demand.
  bool aggregated = true;
  double divisor = 1.0;
  int servers = 1;
  // NIC stations draw demand in bits and serve at `bandwidth` bits/s.
  bool nic = false;
  double bandwidth = 0.0;
};

struct Hop {
  int station = 0;
  Sampler shape;
  // Mean demand: seconds for processors, bits for NICs.
  double mean = 0.0;
};

using Route = std::vector<Hop>;

struct SourceSpec {
  int tenant = 0;
  bool tagged = false;
  // Poisson when renewal is false.
  bool renewal = false;
  double rate = 0.0;
  Sampler interarrival = Sampler::exponential();
  double interarrival_mean = 0.0;
  std::vector<Route> routes;
  int route = 0;
};

struct Job {
  int source = 0;
  int route = 0;
  std::uint32_t hop = 0;
  std::uint64_t id = 0;
  double t_arrival = 0.0;
  double t_station = 0.0;
  std::array<double, kMaxHops> demand{};
  std::array<double, kMaxHops> wait{};
};

struct StationStats {
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  double sum_sojourn = 0.0;
  double area_jobs = 0.0;
  double area_busy = 0.0;
  std::vector<double> waits;
};

struct Completion {
  const Job* job;
  double t;
};

class Network {
 public:
  Network(std::uint64_t seed, std::size_t queue_bound);

  int add_station(StationSpec spec);
  int add_source(SourceSpec spec);

  // Starts every source; call once before run(). Sources added afterwards
  // start immediately.
  void start();

  // Processes events until `stop` returns true after an event or the event
  // set drains. Callbacks scheduled with at() run in timestamp order with
  // ties broken by scheduling order.
  void run(const std::function<bool()>& stop);

  void at(double t, std::function<void()> fn);

  void set_rate(int source, double rate);
  void set_route(int source, int route) { sources_[source].spec.route = route; }
  void set_bandwidth(int station, double bandwidth) { stations_[station].spec.bandwidth = bandwidth; }
  const StationSpec& station_spec(int station) const { return stations_[station].spec; }
  const SourceSpec& source_spec(int source) const { return sources_[source].spec; }

  // Clears accumulated statistics and opens a new measurement window.
  void reset_stats();

  double now() const { return now_; }
  double window_start() const { return window_start_; }
  std::size_t station_count() const { return stations_.size(); }
  const StationStats& stats(int station) const { return stations_[station].stats; }
  // Brings the time integrals up to now().
  void settle();
  std::size_t in_station(int station) const;
  int busy(int station) const { return stations_[station].busy; }

  std::uint64_t arrivals() const { return arrivals_; }
  std::uint64_t completions() const { return completions_; }
  std::uint64_t in_flight() const { return arrivals_ - completions_; }

  bool record_waits = true;
  std::function<void(const Job&, double)> on_complete;
  std::function<void(int source, double t)> on_source_arrival;
  std::function<void(int station, const Job&, double t)> on_station_arrival;
  // Raw demand (seconds) of work completed at a processor station.
  std::function<void(int station, const Job&, double demand, double t)> on_service_done;

 private:
  enum class EventKind : std::uint8_t { Arrival, Departure, ServerFree, Release, Callback };

  struct Event {
    double t;
    std::uint64_t seq;
    EventKind kind;
    std::uint32_t a;
    std::uint64_t b;
  };
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.t != y.t) return x.t > y.t;
      return x.seq > y.seq;
    }
  };

  struct Station {
    StationSpec spec;
    std::deque<std::uint32_t> queue;
    int busy = 0;
    // Jobs at the station: queued, in service or finishing their demand.
    std::size_t present = 0;
    double t_last = 0.0;
    StationStats stats;
  };

  struct Source {
    SourceSpec spec;
    Rng arrival_rng;
    std::vector<Rng> service_rng;
    std::uint64_t generation = 0;
  };

  void push(double t, EventKind kind, std::uint32_t a, std::uint64_t b);
  void schedule_arrival(int source);
  void on_arrival(int source, std::uint64_t generation);
  void enter(std::uint32_t job);
  void begin_service(Station& st, std::uint32_t job, int station);
  void free_server(int station);
  void release(int station, std::uint32_t job);
  void advance(Station& st);
  std::uint32_t alloc_job();

  std::uint64_t seed_;
  bool started_ = false;
  std::size_t queue_bound_;
  double now_ = 0.0;
  double window_start_ = 0.0;
  std::uint64_t seq_ = 0;
  std::uint64_t next_job_id_ = 0;
  std::uint64_t arrivals_ = 0;
  std::uint64_t completions_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::vector<Station> stations_;
  std::vector<Source> sources_;
  std::vector<Job> jobs_;
  std::vector<std::uint32_t> free_jobs_;
  std::vector<std::function<void()>> callbacks_;
};

}  // namespace edgeq::detail
