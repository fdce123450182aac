#ifndef ILIM_H
#define ILIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result codes.
typedef enum IlimStatus {
  ILIM_STATUS_OK = 0,
  ILIM_STATUS_NULL_POINTER = 1,
  ILIM_STATUS_INVALID_ARGUMENT = 2,
  ILIM_STATUS_BUFFER_TOO_SMALL = 3,
  ILIM_STATUS_CFL = 4,
  ILIM_STATUS_NON_FINITE = 5,
  ILIM_STATUS_MISMATCH = 6,
  ILIM_STATUS_FORMAT = 7,
  ILIM_STATUS_IO = 8,
  ILIM_STATUS_SWEEP_FAILED = 9,
  ILIM_STATUS_PANIC = 10,
} IlimStatus;

// Channel grid handle.
typedef struct IlimGrid IlimGrid;

// Paired Navier-Stokes / Euler run handle.
typedef struct IlimRun IlimRun;

// Forcing callback for [`ilim_gronwall_envelope`].
typedef double (*IlimForcing)(double t, void *user);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ilim_version(void);

// Message of the last failed call on this thread, or NULL. The pointer stays
// valid until the next call into the library from the same thread.
const char *ilim_last_error_message(void);

// Creates a channel grid; `tanh_strength <= 0` selects uniform spacing.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum IlimStatus ilim_grid_new(size_t nx,
                              size_t ny,
                              double period,
                              double height,
                              double tanh_strength,
                              struct IlimGrid **out);

// # Safety
// `grid` must come from [`ilim_grid_new`] and not be freed twice; NULL is ignored.
void ilim_grid_free(struct IlimGrid *grid);

// # Safety
// `grid` must be a live handle; `nx`, `ny` valid writable pointers.
enum IlimStatus ilim_grid_size(const struct IlimGrid *grid, size_t *nx, size_t *ny);

// Copies the `ny` wall-normal coordinates into `out`.
//
// # Safety
// `grid` must be a live handle and `out` must hold `len` doubles.
enum IlimStatus ilim_grid_y_coords(const struct IlimGrid *grid, double *out, size_t len);

// Flat corrector for the wall trace `trace` (`nx` samples) at time `t`.
// Components are written row by row (`index = j * nx + i`).
//
// # Safety
// `trace` must hold `nx` doubles; `phi1` and `phi2` must each hold `len` doubles.
enum IlimStatus ilim_flat_corrector(const struct IlimGrid *grid,
                                    const double *trace,
                                    size_t nx,
                                    double alpha,
                                    double t,
                                    double *phi1,
                                    double *phi2,
                                    size_t len);

// Kato layer height for the schedule `m_form` (e.g. `"power:1,0.5"`) and
// constant `c`. `clamped` is set to 1 when the logarithm was not positive.
//
// # Safety
// `m_form` must be a NUL-terminated string; `height` and `clamped` writable.
enum IlimStatus ilim_layer_height(double nu,
                                  double t,
                                  const char *m_form,
                                  double c,
                                  double *height,
                                  int32_t *clamped);

// Exact shear flow from `v(y) = -amplitude (1 - exp(-y / scale))` with a
// stress-free lid at `height`, evaluated at `ys`.
//
// # Safety
// `ys` and `out` must each hold `n` doubles.
enum IlimStatus ilim_shear_exact(double nu,
                                 double t,
                                 double amplitude,
                                 double scale,
                                 double height,
                                 const double *ys,
                                 size_t n,
                                 double *out);

// Least-squares exponent of `errors ≈ C nus^exponent`.
//
// # Safety
// `nus` and `errors` must hold `n` doubles; outputs must be writable.
enum IlimStatus ilim_fit_rate(const double *nus,
                              const double *errors,
                              size_t n,
                              double *exponent,
                              double *intercept);

// Solution of `y' = 2 c y + 2 f(t)`, `y(0) = 0`, at `t_k = k T / n`, `k = 0..=n`.
//
// # Safety
// `out` must hold `len >= n + 1` doubles; `forcing` must be safe to call with `user`.
enum IlimStatus ilim_gronwall_envelope(double c_growth,
                                       IlimForcing forcing,
                                       void *user,
                                       double horizon,
                                       size_t n,
                                       double *out,
                                       size_t len);

// Runs a paired simulation from a TOML sweep configuration at viscosity
// `nu` (the first configured value when `nu <= 0`).
//
// # Safety
// `config_toml` must be a NUL-terminated string; `out` writable.
enum IlimStatus ilim_run_new(const char *config_toml, double nu, struct IlimRun **out);

// # Safety
// `run` must come from [`ilim_run_new`] and not be freed twice; NULL is ignored.
void ilim_run_free(struct IlimRun *run);

// Number of stored output times.
//
// # Safety
// `run` must be a live handle and `len` writable.
enum IlimStatus ilim_run_len(const struct IlimRun *run, size_t *len);

// # Safety
// `run` must be a live handle and `out` must hold `len` doubles.
enum IlimStatus ilim_run_times(const struct IlimRun *run, double *out, size_t len);

// `‖u − ū‖²` at every output time.
//
// # Safety
// `run` must be a live handle and `out` must hold `len` doubles.
enum IlimStatus ilim_run_error_series(const struct IlimRun *run, double *out, size_t len);

// Evaluates the layer criteria; `r <= 0` or infinite selects `L^∞`.
// `all_pass` receives 1 when every criterion holds at every time. When
// `csv_path` is not NULL the report is written there.
//
// # Safety
// Pointers must be valid; `csv_path` may be NULL.
enum IlimStatus ilim_run_criteria(const struct IlimRun *run,
                                  const char *m_form,
                                  double c,
                                  double r,
                                  const char *csv_path,
                                  int32_t *all_pass);

// Stores both trajectories as ILIM1 snapshots under `dir/ns` and `dir/euler`.
//
// # Safety
// `run` must be a live handle and `dir` a NUL-terminated path.
enum IlimStatus ilim_run_write(const struct IlimRun *run, const char *dir);

// Runs a full sweep and writes its report into `out_dir`. `exponent`
// receives the fitted rate, or NaN when it is undefined.
//
// # Safety
// `config_toml` and `out_dir` must be NUL-terminated strings; `exponent` writable.
enum IlimStatus ilim_sweep_run(const char *config_toml,
                               size_t jobs,
                               const char *out_dir,
                               double *exponent);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ILIM_H */
