#include "neusurf/eval/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace neusurf {

void EvalReport::validate() const {
  if (!(noise_percent >= 0.0 && noise_percent <= 100.0))
    throw std::invalid_argument("EvalReport: noise_percent outside [0, 100]");
  if (total_faces < 1) throw std::invalid_argument("EvalReport: total_faces < 1");
  if (removed_faces < 0 || removed_faces > total_faces)
    throw std::invalid_argument("EvalReport: removed_faces outside [0, total_faces]");
  const Real expected = 100.0 * static_cast<Real>(removed_faces) /
                        static_cast<Real>(total_faces);
  if (std::abs(noise_percent - expected) > 1e-9)
    throw std::invalid_argument("EvalReport: noise_percent disagrees with face counts");
  if (sample_count < 1) throw std::invalid_argument("EvalReport: sample_count < 1");
  if (mask_dilation < 0) throw std::invalid_argument("EvalReport: mask_dilation < 0");
  if (!(unmasked_cd >= 0.0) || !std::isfinite(unmasked_cd))
    throw std::invalid_argument("EvalReport: unmasked_cd not a finite nonnegative value");
  if (!(masked_cd >= 0.0) || !std::isfinite(masked_cd))
    throw std::invalid_argument("EvalReport: masked_cd not a finite nonnegative value");
  for (Real v : view_psnr)
    if (std::isnan(v)) throw std::invalid_argument("EvalReport: NaN view PSNR");
}

Real masked_cd(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
               const Mat& ref_points, const EvalConfig& config) {
  const HullFilter filtered =
      visual_hull_filter(mesh, silhouettes, config.mask_dilation);
  if (filtered.inside.triangle_count() == 0)
    throw std::runtime_error("masked_cd: the visual hull removed every face");
  Rng rng(config.seed);
  const Mat points = sample_mesh_points(filtered.inside, config.sample_count, rng);
  return chamfer_eval(points, ref_points, config.squared);
}

EvalReport evaluate_mesh(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
                         const Mat& ref_points, const EvalConfig& config) {
  EvalReport report;
  report.sample_count = config.sample_count;
  report.squared = config.squared;
  report.seed = config.seed;
  report.mask_dilation = config.mask_dilation;
  report.total_faces = mesh.triangle_count();

  // Both clouds restart the sampling stream so that a mask which removes
  // nothing reproduces the unmasked cloud (and distance) bit for bit.
  {
    Rng rng(config.seed);
    const Mat points = sample_mesh_points(mesh, config.sample_count, rng);
    report.unmasked_cd = chamfer_eval(points, ref_points, config.squared);
  }
  const HullFilter filtered =
      visual_hull_filter(mesh, silhouettes, config.mask_dilation);
  report.removed_faces = filtered.removed_faces;
  report.noise_percent = 100.0 * static_cast<Real>(filtered.removed_faces) /
                         static_cast<Real>(mesh.triangle_count());
  if (filtered.inside.triangle_count() == 0)
    throw std::runtime_error("evaluate_mesh: the visual hull removed every face");
  {
    Rng rng(config.seed);
    const Mat points = sample_mesh_points(filtered.inside, config.sample_count, rng);
    report.masked_cd = chamfer_eval(points, ref_points, config.squared);
  }

  report.validate();
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  const char* kind = report.squared ? "squared" : "plain";
  out << "chamfer distance (unmasked, " << kind << "): " << report.unmasked_cd << "\n";
  out << "chamfer distance (masked,   " << kind << "): " << report.masked_cd << "\n";
  out << "mesh noise ratio: " << report.noise_percent << " % (" << report.removed_faces
      << " of " << report.total_faces << " faces outside the visual hull)\n";
  out << "samples per cloud: " << report.sample_count << " (seed " << report.seed
      << ", mask dilation " << report.mask_dilation << " px)\n";
  if (!report.view_psnr.empty()) {
    Real mean = 0.0;
    for (Real v : report.view_psnr) mean += v;
    mean /= static_cast<Real>(report.view_psnr.size());
    out << "mean view PSNR: " << mean << " dB over " << report.view_psnr.size()
        << " views\n";
  }
  return out.str();
}

void save_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_report_csv: cannot open " + path);
  out << "unmasked_cd,masked_cd,noise_percent,total_faces,removed_faces,"
         "sample_count,squared,seed,mask_dilation,mean_psnr\n";
  out << std::setprecision(17);
  out << report.unmasked_cd << ',' << report.masked_cd << ',' << report.noise_percent
      << ',' << report.total_faces << ',' << report.removed_faces << ','
      << report.sample_count << ',' << (report.squared ? 1 : 0) << ',' << report.seed
      << ',' << report.mask_dilation << ',';
  if (!report.view_psnr.empty()) {
    Real mean = 0.0;
    for (Real v : report.view_psnr) mean += v;
    out << mean / static_cast<Real>(report.view_psnr.size());
  }
  out << '\n';
  if (!out) throw std::runtime_error("save_report_csv: write failed for " + path);
}

}  // namespace neusurf
