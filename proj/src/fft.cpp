#include "gowerslab/fft.hpp"

#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace gowerslab {

Eigen::ArrayXcd dft_forward(const Eigen::ArrayXcd& x) {
    if (x.size() == 0) throw std::invalid_argument("dft_forward: empty signal");
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    return Eigen::Map<const Eigen::ArrayXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::ArrayXcd dft_inverse(const Eigen::ArrayXcd& X) {
    if (X.size() == 0) throw std::invalid_argument("dft_inverse: empty signal");
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(X.data(), X.data() + X.size());
    std::vector<std::complex<double>> out;
    fft.inv(out, in);
    return Eigen::Map<const Eigen::ArrayXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

} // namespace gowerslab
