#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phaselab/circuit.hpp"

namespace phaselab {

struct StateVector {
    int n = 0;
    std::vector<cplx> amp;  // 2^n amplitudes, |q=0> is bit 0

    static StateVector zero_state(int n);
    double norm2() const;
};

struct DensityMatrix {
    int n = 0;
    std::vector<cplx> rho;  // row-major D x D, D = 2^n

    static DensityMatrix zero_state(int n);
    static DensityMatrix pure(const StateVector& psi);
    double trace_real() const;
    std::vector<double> diagonal() const;
};

struct SampleSet {
    int n = 0;
    std::vector<std::uint64_t> bitstrings;
    std::vector<double> probs;  // ideal probability of each sampled string
    std::string source;
};

void apply_1q(StateVector& psi, int qubit, const Mat2& u);
// u in basis |q_high q_low>; requires q_low < q_high.
void apply_2q(StateVector& psi, int q_low, int q_high, const Mat4& u);
// u in basis |qa qb> (first listed qubit most significant), any order.
void apply_gate_2q(StateVector& psi, int qa, int qb, const Mat4& u);

void apply_1q(DensityMatrix& rho, int qubit, const Mat2& u);
void apply_2q(DensityMatrix& rho, int q0, int q1, const Mat4& u);
// Depolarizing with rate semantics: traceless Pauli components on the target
// decay by exp(-4 p1/3) (single qubit) or exp(-16 p2/15) (pair). In-place.
void depolarize_1q(DensityMatrix& rho, int qubit, double p1);
void depolarize_2q(DensityMatrix& rho, int q0, int q1, double p2);

// Exact evolution of |0...0> through the circuit's gates in order.
StateVector run_ideal(const Circuit& circuit, int max_qubits = 26);

// Density-matrix evolution with depolarizing noise: p2 after every two-qubit
// gate, p1 on every qubit after each cycle's two-qubit layer.
DensityMatrix run_depolarizing(const Circuit& circuit, const NoiseModel& noise,
                               int max_qubits = 13);

// Pauli-trajectory unravelling of the same channel; averaging pure-state
// results over seeds reproduces run_depolarizing in expectation.
StateVector run_trajectory(const Circuit& circuit, const NoiseModel& noise, std::uint64_t seed,
                           int max_qubits = 26);

std::vector<double> probabilities(const StateVector& psi);

// Born sampling. `probs` in the result are ideal_probs[s] when provided
// (sampling distribution and ideal distribution may differ, e.g. noisy rho).
SampleSet sample_bitstrings(const std::vector<double>& sampling_probs,
                            const std::vector<double>& ideal_probs, int n, std::size_t count,
                            std::uint64_t seed);
SampleSet sample_bitstrings(const StateVector& psi, std::size_t count, std::uint64_t seed);
SampleSet sample_bitstrings(const DensityMatrix& rho, const std::vector<double>& ideal_probs,
                            std::size_t count, std::uint64_t seed);

// Linear XEB of a model distribution against ideal probabilities (full sums,
// no sampling): D * sum_z q(z) p(z) - 1.
double xeb_between(const std::vector<double>& model_probs, const std::vector<double>& ideal_probs);

double state_fidelity(const DensityMatrix& rho, const StateVector& psi);

// Little-endian binary dump: "PHSV", u32 version, u32 n, 2^n (re, im) f64.
void write_state(const StateVector& psi, const std::string& path);
StateVector read_state(const std::string& path);

// Newline-separated fixed-width hex bitstrings.
void write_samples(const SampleSet& samples, const std::string& path);
std::vector<std::uint64_t> read_samples(const std::string& path, int n);

}  // namespace phaselab
