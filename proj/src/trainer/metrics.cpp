#include <ostream>

#include "echomod/format.hpp"
#include "echomod/trainer.hpp"

namespace echomod {

void write_metrics_csv(std::ostream& out, std::span<const IterationRecord> records) {
  out << "iteration,agent,ber,mean_symbol_energy,sigma_re,sigma_im\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << r.agent << ',' << format_double(r.ber) << ','
        << format_double(r.mean_symbol_energy) << ',' << format_double(r.sigma_re) << ','
        << format_double(r.sigma_im) << '\n';
  }
}

}  // namespace echomod
