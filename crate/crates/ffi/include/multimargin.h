#ifndef MULTIMARGIN_H
#define MULTIMARGIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MmStatus {
  MM_STATUS_OK = 0,
  MM_STATUS_NULL_POINTER = 1,
  MM_STATUS_INVALID_UTF8 = 2,
  MM_STATUS_DOMAIN = 3,
  MM_STATUS_UNSUPPORTED_LOSS = 4,
  MM_STATUS_ORACLE = 5,
  MM_STATUS_OVERFLOW = 6,
  MM_STATUS_NOT_AVAILABLE = 7,
  MM_STATUS_PARSE = 8,
  MM_STATUS_IO = 9,
  MM_STATUS_BUFFER_TOO_SMALL = 10,
  MM_STATUS_PANIC = 11,
  MM_STATUS_STUDY = 12,
} MmStatus;

/**
 * Labelled sample; labels are 1-based.
 */
typedef struct MmDataset MmDataset;

/**
 * Random stream bound to a world and seed.
 */
typedef struct MmGenerator MmGenerator;

/**
 * Fitted or parsed decision rule.
 */
typedef struct MmModel MmModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (empty after a success)
 * into `buf`. Returns the message length including the NUL; when it
 * exceeds `cap` nothing is written. `buf` may be null to query the length.
 */
size_t mm_last_error(char *buf, size_t cap);

/**
 * Margin loss `h(u)` for a loss named as in configs (`svm1`, `hinge`, …).
 */
enum MmStatus mm_loss_eval(const char *loss, const double *u, size_t len, double *out);

/**
 * Largest negative root of the planar-world quartic at `theta`.
 */
enum MmStatus mm_quartic_root(double theta, double *out);

enum MmStatus mm_generator_new(const char *spec, uint64_t seed, struct MmGenerator **out);

/**
 * Draws the next `n` points of the generator's stream.
 */
enum MmStatus mm_generator_sample(struct MmGenerator *gen, size_t n, struct MmDataset **out);

void mm_generator_free(struct MmGenerator *gen);

/**
 * Builds a dataset from `n` row-major points of dimension `d` and 1-based
 * labels in `1..=k`.
 */
enum MmStatus mm_dataset_new(size_t k,
                             size_t d,
                             size_t n,
                             const double *x,
                             const uint32_t *y,
                             struct MmDataset **out);

size_t mm_dataset_len(const struct MmDataset *data);

size_t mm_dataset_dim(const struct MmDataset *data);

size_t mm_dataset_classes(const struct MmDataset *data);

/**
 * Copies point `i` (`dim` values) into `x` and its label into `y`.
 */
enum MmStatus mm_dataset_get(const struct MmDataset *data, size_t i, double *x, uint32_t *y);

void mm_dataset_free(struct MmDataset *data);

/**
 * Fits a model with settings given as a `key = value` config document
 * (`loss`, `penalty` and `lambda` required).
 */
enum MmStatus mm_fit(const char *config, const struct MmDataset *data, struct MmModel **out);

/**
 * Parses a model document as written by [`mm_model_serialize`].
 */
enum MmStatus mm_model_parse(const char *doc, struct MmModel **out);

/**
 * Writes the model document into `buf`; `needed` receives its size
 * including the NUL (pass a null `buf` to query it).
 */
enum MmStatus mm_model_serialize(const struct MmModel *model,
                                 char *buf,
                                 size_t cap,
                                 size_t *needed);

size_t mm_model_classes(const struct MmModel *model);

size_t mm_model_dim(const struct MmModel *model);

/**
 * Decision vector `f(x)`; `x` has `dim` entries and `out` `k` entries.
 */
enum MmStatus mm_model_eval(const struct MmModel *model,
                            const double *x,
                            size_t dim,
                            double *out,
                            size_t k);

/**
 * Argmax class (1-based, lowest index on ties) at `x`.
 */
enum MmStatus mm_model_classify(const struct MmModel *model,
                                const double *x,
                                size_t dim,
                                uint32_t *out);

/**
 * Generalization error of the model in a world, with its standard error
 * (zero when computed exactly). `stderr_out` may be null.
 */
enum MmStatus mm_generalization_error(const char *spec,
                                      const struct MmModel *model,
                                      double *value_out,
                                      double *stderr_out);

void mm_model_free(struct MmModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULTIMARGIN_H */
