#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "brbm/rng.hpp"

namespace brbm {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

/// Default population guard: simulations abort instead of truncating.
inline constexpr std::size_t kDefaultGuard = 5'000'000;

/// One lifetime of one particle: from its birth (at its parent's split) to its
/// own split, or to the horizon for particles alive at the end.
/// Positions are signed (pre-reflection) unless the owning genealogy is a
/// reflected copy.
struct LineageNode {
    NodeId id = 0;
    NodeId parent = kNoParent;
    double birth_time = 0.0;
    double birth_position = 0.0;
    double split_time = 0.0;
    double endpoint_position = 0.0;
};

/// The full branching forest of one replicate.
class Genealogy {
public:
    NodeId add(NodeId parent, double birth_time, double birth_position);
    void close(NodeId id, double split_time, double endpoint_position);

    const LineageNode& node(NodeId id) const;
    std::span<const LineageNode> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    /// Split time of the deepest common ancestor of u and v. For u == v this is
    /// the node's own split time, i.e. the horizon for a live particle.
    double mrca_time(NodeId u, NodeId v) const;

    /// Copy with every stored position replaced by its absolute value.
    Genealogy reflected() const;

private:
    std::vector<LineageNode> nodes_;
    std::vector<std::uint32_t> depth_;
};

struct Particle {
    NodeId id = 0;
    double position = 0.0;
};

/// Particles alive at `horizon`, with a handle on the genealogy that produced
/// them. Several snapshots (nested observation times) may share a genealogy.
struct PopulationSnapshot {
    double horizon = 0.0;
    std::vector<Particle> particles;
    std::shared_ptr<const Genealogy> genealogy;
    bool reflected = false;

    std::size_t size() const { return particles.size(); }
};

/// Exact event-driven binary branching Brownian motion: Exp(1) lifetimes,
/// Gaussian displacement over each lifetime, started from one particle at
/// `origin`.
///
/// Throws ResourceError once the population provably exceeds `guard`.
PopulationSnapshot simulate_bbm(double horizon, RngStream& stream, std::size_t guard = kDefaultGuard,
                                double origin = 0.0);

/// One replicate observed at every time in `times` (sorted ascending); the
/// last entry is the horizon. Positions at intermediate times are sampled on
/// the same paths, so snapshots are nested.
std::vector<PopulationSnapshot> simulate_bbm_observed(std::span<const double> times, RngStream& stream,
                                                      std::size_t guard = kDefaultGuard, double origin = 0.0);

/// Absolute values of all positions. Throws std::logic_error if `snap` is
/// already reflected.
PopulationSnapshot reflect_population(const PopulationSnapshot& snap);

struct Extremes {
    double max = 0.0;
    double min = 0.0;
};

Extremes extremes(const PopulationSnapshot& snap);

/// MRCA time of two particles; throws std::out_of_range on unknown ids.
double mrca_time(const Genealogy& genealogy, NodeId u, NodeId v);

/// Ids of particles inside [a t - f(t), a t + f(t)].
///
/// Requires |a| <= sqrt 2, and f(t) >= log(t) / (2 sqrt 2) when |a| = sqrt 2.
std::vector<NodeId> cluster_members(const PopulationSnapshot& snap, double velocity,
                                    const std::function<double(double)>& width);

/// Columnar export: replicate_id,particle_id,parent_id,birth_time,split_time,endpoint_position.
/// The root's parent_id is written as -1.
void write_snapshot_header(std::ostream& out);
void write_snapshot_records(std::ostream& out, std::uint64_t replicate_id, const PopulationSnapshot& snap);

}  // namespace brbm
