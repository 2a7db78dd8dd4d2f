#ifndef MAPMATCH_BUNDLE_HPP
#define MAPMATCH_BUNDLE_HPP

#include <memory>
#include <string>

#include "mapmatch/trajectory_index.hpp"

namespace mapmatch {

struct BuildOptions {
    double eps = 0.25;
    double rel_tol = 1e-9;
    std::uint64_t seed = 0;
    bool parallel = true;
    int packedness_samples = 64;
};

// The persisted artifact: graph plus all three index stages and the build
// parameters. eps is fixed at build time; queries use the recorded value.
// Deterministic structures (SSPD, transit cuts, hierarchy, troughs) are
// rebuilt on load; the transit distance table and the touched grid-store
// entries are persisted verbatim, so reloaded bundles answer bit-identically.
class IndexBundle {
  public:
    static IndexBundle build(GeometricGraph g, const BuildOptions& opts);

    void save(const std::string& path) const;
    static IndexBundle load(const std::string& path);

    const GeometricGraph& graph() const { return *g_; }
    const Stage1Index& stage1() const { return *s1_; }
    const SegmentIndex& stage2() const { return *s2_; }
    const TrajectoryIndex& stage3() const { return *s3_; }
    const BuildOptions& options() const { return opts_; }
    double eps() const { return opts_.eps; }

  private:
    IndexBundle() = default;
    std::unique_ptr<GeometricGraph> g_;
    std::unique_ptr<Stage1Index> s1_;
    std::unique_ptr<SegmentIndex> s2_;
    std::unique_ptr<TrajectoryIndex> s3_;
    BuildOptions opts_;
};

}  // namespace mapmatch

#endif
