// Reconstructs the Shepp-Logan phantom from a short fan-beam scan with each
// 2D method and prints the ROI PSNR and SSIM.
#include <cstdio>
#include <cstdlib>

#include "arcfbp/arcfbp.hpp"

int main(int argc, char** argv) {
    using namespace arcfbp;
    const double end_deg = argc > 1 ? std::atof(argv[1]) : 252.0;

    ScanGeometry g;
    g.kind = DetectorKind::FanCurved;
    g.lambda_end = deg2rad(end_deg);

    const Phantom phantom = shepp_logan(2, g.object_radius);
    const Grid grid{256, 256, 1, 2.0, 2.0};
    const Image truth = rasterize(phantom, grid, 4);
    const Projections proj = simulate(phantom, g, 8);

    std::printf("scan [0, %g] deg, %d views, %d channels\n", end_deg, proj.views(), proj.cols());
    for (Algorithm a : {Algorithm::Arc, Algorithm::Ace, Algorithm::Cfa}) {
        ReconConfig cfg;
        cfg.algorithm = a;
        cfg.grid = grid;
        cfg.convolution = ConvolutionMethod::Fft;
        cfg.workers = 8;
        const Reconstruction r = reconstruct(proj, cfg);
        const EvalReport rep = evaluate(r.image, truth, 0.9 * g.object_radius, {}, 8);
        std::printf("%-4s psnr %6.2f dB  ssim %.4f\n", std::string(to_string(a)).c_str(), rep.psnr, rep.ssim);
    }
    return 0;
}
