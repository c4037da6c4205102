#include "network.hpp"

#include "edgeq/error.hpp"

namespace edgeq::detail {

namespace {
std::uint64_t arrival_stream(int source) { return static_cast<std::uint64_t>(source) << 16; }
std::uint64_t service_stream(int source, int station) {
  return arrival_stream(source) + 1 + static_cast<std::uint64_t>(station);
}
}  // namespace

Network::Network(std::uint64_t seed, std::size_t queue_bound)
    : seed_(seed), queue_bound_(queue_bound) {}

int Network::add_station(StationSpec spec) {
  if (!sources_.empty()) throw Error(ErrorCode::InvalidArgument, "add stations before sources");
  Station st;
  st.spec = std::move(spec);
  stations_.push_back(std::move(st));
  return static_cast<int>(stations_.size()) - 1;
}

int Network::add_source(SourceSpec spec) {
  const int id = static_cast<int>(sources_.size());
  for (const auto& r : spec.routes)
    if (r.size() > kMaxHops) throw Error(ErrorCode::InvalidArgument, "route too long");
  Source src{std::move(spec), Rng(seed_, arrival_stream(id)), {}, 0};
  for (std::size_t s = 0; s < stations_.size(); ++s)
    src.service_rng.emplace_back(seed_, service_stream(id, static_cast<int>(s)));
  sources_.push_back(std::move(src));
  if (started_) schedule_arrival(id);
  return id;
}

void Network::start() {
  started_ = true;
  for (std::size_t i = 0; i < sources_.size(); ++i) schedule_arrival(static_cast<int>(i));
}

void Network::push(double t, EventKind kind, std::uint32_t a, std::uint64_t b) {
  events_.push(Event{t, seq_++, kind, a, b});
}

void Network::at(double t, std::function<void()> fn) {
  callbacks_.push_back(std::move(fn));
  push(t, EventKind::Callback, static_cast<std::uint32_t>(callbacks_.size() - 1), 0);
}

void Network::schedule_arrival(int source) {
  auto& src = sources_[source];
  double gap = 0.0;
  if (src.spec.renewal) {
    gap = src.spec.interarrival.draw(src.arrival_rng, src.spec.interarrival_mean);
  } else {
    if (src.spec.rate <= 0.0) return;
    gap = src.arrival_rng.exponential(1.0 / src.spec.rate);
  }
  push(now_ + gap, EventKind::Arrival, static_cast<std::uint32_t>(source), src.generation);
}

void Network::set_rate(int source, double rate) {
  auto& src = sources_[source];
  src.spec.rate = rate;
  src.spec.renewal = false;
  ++src.generation;
  // Exponential gaps are memoryless, so redrawing from now is exact.
  if (started_) schedule_arrival(source);
}

std::uint32_t Network::alloc_job() {
  if (!free_jobs_.empty()) {
    const auto id = free_jobs_.back();
    free_jobs_.pop_back();
    return id;
  }
  jobs_.emplace_back();
  return static_cast<std::uint32_t>(jobs_.size() - 1);
}

void Network::on_arrival(int source, std::uint64_t generation) {
  auto& src = sources_[source];
  if (generation != src.generation) return;
  schedule_arrival(source);
  ++arrivals_;
  if (on_source_arrival) on_source_arrival(source, now_);

  const std::uint32_t id = alloc_job();
  Job& job = jobs_[id];
  job.source = source;
  job.route = src.spec.route;
  job.hop = 0;
  job.id = next_job_id_++;
  job.t_arrival = now_;
  const Route& route = src.spec.routes[job.route];
  for (std::size_t h = 0; h < route.size(); ++h) {
    const Hop& hop = route[h];
    job.demand[h] = hop.shape.draw(src.service_rng[hop.station], hop.mean);
    job.wait[h] = 0.0;
  }
  enter(id);
}

void Network::advance(Station& st) {
  const double dt = now_ - st.t_last;
  if (dt > 0.0) {
    st.stats.area_jobs += dt * static_cast<double>(st.present);
    st.stats.area_busy += dt * st.busy;
  }
  st.t_last = now_;
}

void Network::enter(std::uint32_t id) {
  Job& job = jobs_[id];
  const Route& route = sources_[job.source].spec.routes[job.route];
  if (job.hop >= route.size()) {
    ++completions_;
    if (on_complete) on_complete(job, now_);
    free_jobs_.push_back(id);
    return;
  }
  const int station = route[job.hop].station;
  Station& st = stations_[station];
  advance(st);
  ++st.stats.arrivals;
  ++st.present;
  job.t_station = now_;
  if (on_station_arrival) on_station_arrival(station, job, now_);
  const int capacity = st.spec.aggregated ? 1 : st.spec.servers;
  if (st.busy < capacity) {
    begin_service(st, id, station);
  } else {
    st.queue.push_back(id);
    if (st.queue.size() > queue_bound_) throw UnstableError(st.spec.name, std::numeric_limits<double>::quiet_NaN());
  }
}

void Network::begin_service(Station& st, std::uint32_t id, int station) {
  Job& job = jobs_[id];
  job.wait[job.hop] = now_ - job.t_station;
  double service = job.demand[job.hop];
  if (st.spec.nic) service /= st.spec.bandwidth;
  ++st.busy;
  const auto s = static_cast<std::uint32_t>(station);
  if (st.spec.aggregated && st.spec.divisor != 1.0) {
    push(now_ + service / st.spec.divisor, EventKind::ServerFree, s, 0);
    push(now_ + service, EventKind::Release, s, id);
  } else {
    push(now_ + service, EventKind::Departure, s, id);
  }
}

void Network::free_server(int station) {
  Station& st = stations_[station];
  advance(st);
  --st.busy;
  if (!st.queue.empty()) {
    const auto next = st.queue.front();
    st.queue.pop_front();
    begin_service(st, next, station);
  }
}

void Network::release(int station, std::uint32_t id) {
  Station& st = stations_[station];
  advance(st);
  --st.present;
  Job& job = jobs_[id];
  ++st.stats.departures;
  st.stats.sum_sojourn += now_ - job.t_station;
  if (record_waits) st.stats.waits.push_back(job.wait[job.hop]);
  if (on_service_done && !st.spec.nic) on_service_done(station, job, job.demand[job.hop], now_);
  ++job.hop;
  enter(id);
}

void Network::run(const std::function<bool()>& stop) {
  while (!events_.empty()) {
    const Event ev = events_.top();
    events_.pop();
    now_ = ev.t;
    switch (ev.kind) {
      case EventKind::Arrival:
        on_arrival(static_cast<int>(ev.a), ev.b);
        break;
      case EventKind::Departure:
        free_server(static_cast<int>(ev.a));
        release(static_cast<int>(ev.a), static_cast<std::uint32_t>(ev.b));
        break;
      case EventKind::ServerFree:
        free_server(static_cast<int>(ev.a));
        break;
      case EventKind::Release:
        release(static_cast<int>(ev.a), static_cast<std::uint32_t>(ev.b));
        break;
      case EventKind::Callback: {
        // The callback may schedule more callbacks, so move it out first.
        auto fn = std::move(callbacks_[ev.a]);
        fn();
        break;
      }
    }
    if (stop && stop()) return;
  }
}

void Network::settle() {
  for (auto& st : stations_) advance(st);
}

void Network::reset_stats() {
  for (auto& st : stations_) {
    st.stats = StationStats{};
    st.t_last = now_;
  }
  window_start_ = now_;
}

std::size_t Network::in_station(int station) const {
  const auto& st = stations_[station];
  return st.present;
}

}  // namespace edgeq::detail
