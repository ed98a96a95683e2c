#include "brbm/branching.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "brbm/errors.hpp"
#include "brbm/stochastic.hpp"

namespace brbm {

NodeId Genealogy::add(NodeId parent, double birth_time, double birth_position) {
    const auto id = static_cast<NodeId>(nodes_.size());
    LineageNode n;
    n.id = id;
    n.parent = parent;
    n.birth_time = birth_time;
    n.birth_position = birth_position;
    n.split_time = birth_time;
    n.endpoint_position = birth_position;
    nodes_.push_back(n);
    depth_.push_back(parent == kNoParent ? 0 : depth_.at(parent) + 1);
    return id;
}

void Genealogy::close(NodeId id, double split_time, double endpoint_position) {
    auto& n = nodes_.at(id);
    n.split_time = split_time;
    n.endpoint_position = endpoint_position;
}

const LineageNode& Genealogy::node(NodeId id) const {
    if (id >= nodes_.size()) throw std::out_of_range("Genealogy: unknown node id " + std::to_string(id));
    return nodes_[id];
}

double Genealogy::mrca_time(NodeId u, NodeId v) const {
    node(u);
    node(v);
    if (u == v) return nodes_[u].split_time;
    while (depth_[u] > depth_[v]) u = nodes_[u].parent;
    while (depth_[v] > depth_[u]) v = nodes_[v].parent;
    while (u != v) {
        u = nodes_[u].parent;
        v = nodes_[v].parent;
    }
    return nodes_[u].split_time;
}

Genealogy Genealogy::reflected() const {
    Genealogy out = *this;
    for (auto& n : out.nodes_) {
        n.birth_position = std::abs(n.birth_position);
        n.endpoint_position = std::abs(n.endpoint_position);
    }
    return out;
}

std::vector<PopulationSnapshot> simulate_bbm_observed(std::span<const double> times, RngStream& stream,
                                                      std::size_t guard, double origin) {
    if (times.empty()) throw std::domain_error("simulate_bbm: no observation times");
    if (times.front() < 0.0) throw std::domain_error("simulate_bbm: negative time");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw std::domain_error("simulate_bbm: times must be strictly ascending");
    if (guard == 0) throw std::domain_error("simulate_bbm: guard must be positive");

    const double horizon = times.back();
    auto genealogy = std::make_shared<Genealogy>();
    std::vector<PopulationSnapshot> snaps(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) snaps[k].horizon = times[k];

    std::vector<NodeId> pending{genealogy->add(kNoParent, 0.0, origin)};
    std::size_t finished = 0;

    while (!pending.empty()) {
        const NodeId id = pending.back();
        pending.pop_back();
        const double birth = genealogy->node(id).birth_time;
        double x = genealogy->node(id).birth_position;

        double end = horizon;
        if (horizon > birth) {
            const double life = sample_exponential(stream, 1.0);
            if (birth + life < horizon) end = birth + life;
        }

        // Waypoints at observation times strictly inside the lifetime.
        double last = birth;
        auto k = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), birth) - times.begin());
        for (; k < times.size() && times[k] < end; ++k) {
            x = sample_gaussian(stream, x, times[k] - last);
            last = times[k];
            snaps[k].particles.push_back({id, x});
        }
        x = sample_gaussian(stream, x, end - last);
        genealogy->close(id, end, x);

        if (end < horizon) {
            pending.push_back(genealogy->add(id, end, x));
            pending.push_back(genealogy->add(id, end, x));
        } else {
            snaps.back().particles.push_back({id, x});
            ++finished;
        }
        if (finished + pending.size() > guard)
            throw ResourceError("simulate_bbm: population exceeds guard of " + std::to_string(guard));
    }

    for (auto& s : snaps) s.genealogy = genealogy;
    return snaps;
}

PopulationSnapshot simulate_bbm(double horizon, RngStream& stream, std::size_t guard, double origin) {
    const double t[] = {horizon};
    return std::move(simulate_bbm_observed(t, stream, guard, origin).back());
}

PopulationSnapshot reflect_population(const PopulationSnapshot& snap) {
    if (snap.reflected) throw std::logic_error("reflect_population: snapshot is already reflected");
    PopulationSnapshot out;
    out.horizon = snap.horizon;
    out.reflected = true;
    out.particles = snap.particles;
    for (auto& p : out.particles) p.position = std::abs(p.position);
    if (snap.genealogy) out.genealogy = std::make_shared<const Genealogy>(snap.genealogy->reflected());
    return out;
}

Extremes extremes(const PopulationSnapshot& snap) {
    if (snap.particles.empty()) throw std::domain_error("extremes: empty snapshot");
    Extremes e{snap.particles.front().position, snap.particles.front().position};
    for (const auto& p : snap.particles) {
        e.max = std::max(e.max, p.position);
        e.min = std::min(e.min, p.position);
    }
    return e;
}

double mrca_time(const Genealogy& genealogy, NodeId u, NodeId v) { return genealogy.mrca_time(u, v); }

std::vector<NodeId> cluster_members(const PopulationSnapshot& snap, double velocity,
                                    const std::function<double(double)>& width) {
    const double t = snap.horizon;
    const double f = width(t);
    if (std::abs(velocity) > kSqrt2 * (1.0 + 1e-12))
        throw std::domain_error("cluster_members: |a| must not exceed sqrt(2)");
    if (std::abs(std::abs(velocity) - kSqrt2) <= 1e-12 && t > 1.0 && f < std::log(t) / (2.0 * kSqrt2))
        throw std::domain_error("cluster_members: window too narrow for an edge cluster");

    const double lo = velocity * t - f;
    const double hi = velocity * t + f;
    std::vector<NodeId> ids;
    for (const auto& p : snap.particles)
        if (p.position >= lo && p.position <= hi) ids.push_back(p.id);
    return ids;
}

void write_snapshot_header(std::ostream& out) {
    out << "replicate_id,particle_id,parent_id,birth_time,split_time,endpoint_position\n";
}

void write_snapshot_records(std::ostream& out, std::uint64_t replicate_id, const PopulationSnapshot& snap) {
    if (!snap.genealogy) return;
    const auto old_precision = out.precision(17);
    for (const auto& n : snap.genealogy->nodes()) {
        out << replicate_id << ',' << n.id << ',';
        if (n.parent == kNoParent)
            out << -1;
        else
            out << n.parent;
        out << ',' << n.birth_time << ',' << n.split_time << ',' << n.endpoint_position << '\n';
    }
    out.precision(old_precision);
}

}  // namespace brbm
