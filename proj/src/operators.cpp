#include "moyal_scatter/operators.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

namespace msc {

VectorXcd apply(const OneParticleOperator& op, const VectorXcd& vhat) {
    if (op.mat.cols() != vhat.size())
        throw invalid_input("apply: operator/vector size mismatch");
    return op.mat * vhat;
}

double hs_norm(const OneParticleOperator& op) { return op.mat.norm(); }
double hs_norm(const MatrixXcd& mat) { return mat.norm(); }

double op_norm_estimate(const MatrixXcd& mat, int iters, unsigned seed) {
    if (mat.size() == 0) return 0.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    VectorXcd v(mat.cols());
    for (long i = 0; i < v.size(); ++i) v[i] = cplx(dist(rng), dist(rng));
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < iters; ++it) {
        VectorXcd w = mat.adjoint() * (mat * v);
        sigma = std::sqrt(w.norm());
        if (w.norm() == 0.0) return 0.0;
        v = w / w.norm();
    }
    return sigma;
}

AntilinearOp charge_conjugation(const SpatialGrid& grid, const DiracRep& rep) {
    const int N = rep.N;
    const long dim = static_cast<long>(grid.modes) * N;
    AntilinearOp C;
    C.mat = MatrixXcd::Zero(dim, dim);
    int idx[2] = {0, 0};
    int nidx[2] = {0, 0};
    for (int m = 0; m < grid.modes; ++m) {
        grid.unflatten(m, idx);
        for (int d = 0; d < grid.dimension; ++d) nidx[d] = grid.wrap(-idx[d]);
        const int mneg = grid.flatten(nidx);
        C.mat.block(static_cast<long>(m) * N, static_cast<long>(mneg) * N, N, N) =
            rep.conj_matrix;
    }
    return C;
}

MatrixXcd blockdiag_spinor(const MatrixXcd& block, const SpatialGrid& grid) {
    const int N = static_cast<int>(block.rows());
    const long dim = static_cast<long>(grid.modes) * N;
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    for (int m = 0; m < grid.modes; ++m)
        out.block(static_cast<long>(m) * N, static_cast<long>(m) * N, N, N) = block;
    return out;
}

namespace {
constexpr char kMagic[8] = {'M', 'S', 'C', 'O', 'P', 'E', 'R', '1'};
}

void save_matrix_binary(const std::string& path, const MatrixXcd& mat) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_matrix_binary: cannot open " + path);
    out.write(kMagic, 8);
    const std::int64_t rows = mat.rows(), cols = mat.cols();
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    // row-major on disk
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c) {
            const double re = mat(r, c).real(), im = mat(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
    if (!out) throw std::runtime_error("save_matrix_binary: write failed for " + path);
}

MatrixXcd load_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_matrix_binary: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("load_matrix_binary: bad magic in " + path);
    std::int64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    if (!in || rows < 0 || cols < 0)
        throw std::runtime_error("load_matrix_binary: bad header in " + path);
    MatrixXcd mat(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            mat(r, c) = cplx(re, im);
        }
    if (!in) throw std::runtime_error("load_matrix_binary: truncated file " + path);
    return mat;
}

void save_operator(const std::string& path, const OneParticleOperator& op,
                   const std::string& basis) {
    save_matrix_binary(path, op.mat);
    nlohmann::json side = {
        {"basis", basis},
        {"label", op.label},
        {"rows", op.mat.rows()},
        {"cols", op.mat.cols()},
        {"dtype", "complex128"},
        {"layout", "row-major"},
    };
    std::ofstream out(path + ".json");
    if (!out) throw std::runtime_error("save_operator: cannot open sidecar for " + path);
    out << side.dump(2) << "\n";
}

OneParticleOperator load_operator(const std::string& path) {
    OneParticleOperator op;
    op.mat = load_matrix_binary(path);
    std::ifstream side(path + ".json");
    if (side) {
        nlohmann::json j;
        side >> j;
        op.label = j.value("label", "");
        if (j.value("rows", op.mat.rows()) != op.mat.rows() ||
            j.value("cols", op.mat.cols()) != op.mat.cols())
            throw std::runtime_error("load_operator: sidecar shape mismatch for " + path);
    }
    return op;
}

}  // namespace msc
