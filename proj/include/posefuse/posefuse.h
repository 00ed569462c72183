/* C interface to the posefuse library. All handles are opaque; every call
 * that can fail returns a pf_status, and pf_last_error() holds the message of
 * the most recent failure on the calling thread. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * pf_string_free. */
#ifndef POSEFUSE_H
#define POSEFUSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(POSEFUSE_BUILDING_LIBRARY)
#define PF_API __attribute__((visibility("default")))
#else
#define PF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_WRONG_KEYPOINT_COUNT,
  PF_ERR_NON_FINITE_COORDINATE,
  PF_ERR_DEGENERATE_POSE,
  PF_ERR_DEGENERATE_CONFIGURATION,
  PF_ERR_EMPTY_BANK,
  PF_ERR_K_TOO_LARGE,
  PF_ERR_TOO_FEW_VECTORS,
  PF_ERR_INDIVISIBLE_DIM,
  PF_ERR_EMPTY_INPUT,
  PF_ERR_DIM_MISMATCH,
  PF_ERR_EMPTY_INDEX,
  PF_ERR_BAD_MAGIC,
  PF_ERR_UNSUPPORTED_VERSION,
  PF_ERR_CORRUPT_PAYLOAD,
  PF_ERR_EMPTY_SUPPORT,
  PF_ERR_OUT_OF_FRAME,
  PF_ERR_LAYOUT_MISMATCH,
  PF_ERR_OUT_OF_RANGE,
  PF_ERR_STALE_CACHE,
  PF_ERR_DIVERGENCE_DETECTED,
  PF_ERR_EMPTY_SET,
  PF_ERR_BAD_RANGE,
  PF_ERR_MISSING_3D,
  PF_ERR_ID_MISMATCH,
  PF_ERR_PARSE,
  PF_ERR_INVALID_ARGUMENT,
  PF_ERR_IO,
  PF_ERR_PARTIAL_FAILURE, /* some manifest jobs failed */
  PF_ERR_INTERNAL
} pf_status;

PF_API const char* pf_status_name(pf_status status);
/* 0 ok, 2 parse, 3 parameter, 4 I/O, 5 partial job failure, 6 divergence, 1 internal. */
PF_API int pf_status_exit_code(pf_status status);
PF_API const char* pf_last_error(void);
PF_API void pf_string_free(char* s);
PF_API const char* pf_version(void);

typedef struct pf_bank pf_bank;
typedef struct pf_index pf_index;
typedef struct pf_image pf_image;

/* ---- pose banks ---- */
PF_API pf_status pf_bank_load(const char* jsonl_path, pf_bank** out);
/* Procedural skeletons, ids "pose<i>". */
PF_API pf_status pf_bank_generate(size_t n, uint64_t seed, pf_bank** out);
/* keypoints: 21 (x, y) pairs. */
PF_API pf_status pf_bank_from_keypoints(const char* id, const double* keypoints, pf_bank** out);
PF_API pf_status pf_bank_write(const pf_bank* bank, const char* jsonl_path);
PF_API size_t pf_bank_size(const pf_bank* bank);
PF_API const char* pf_bank_id(const pf_bank* bank, size_t i);
/* Copies 42 numbers (x0, y0, x1, y1, ...). */
PF_API pf_status pf_bank_keypoints(const pf_bank* bank, size_t i, double* out42);
PF_API void pf_bank_free(pf_bank* bank);

/* ---- product-quantized index ---- */
typedef struct pf_index_params {
  size_t m;            /* subspaces, default 4 */
  size_t k;            /* centroids per subspace, default 256 */
  size_t iters;        /* Lloyd cap, default 25 */
  uint64_t seed;
  size_t train_sample; /* 0 = train on every vector */
  size_t threads;      /* 0 = POSEFUSE_THREADS / auto */
} pf_index_params;

PF_API void pf_index_params_default(pf_index_params* params);
/* summary_json (nullable) receives {"n", "dim", "m", "k", ..., "mse"}. */
PF_API pf_status pf_index_build(const pf_bank* bank, const pf_index_params* params, pf_index** out,
                                char** summary_json);
PF_API pf_status pf_index_save(const pf_index* index, const char* path);
PF_API pf_status pf_index_load(const char* path, pf_index** out);
PF_API size_t pf_index_size(const pf_index* index);
/* Compares the persisted state: shape, codebooks, codes, ids. */
PF_API int pf_index_equal(const pf_index* a, const pf_index* b);
PF_API void pf_index_free(pf_index* index);

/* ---- retrieval ---- */
typedef struct pf_match {
  size_t bank_index;
  double score;
  double transform[6]; /* row-major a11 a12 tx a21 a22 ty, candidate -> target */
} pf_match;

/* Best k matches for target pose `target_i` of `targets`. index == NULL runs
 * the exhaustive search; otherwise ADC shortlist of `shortlist` then exact
 * re-ranking. *count receives the number written (<= k). */
PF_API pf_status pf_retrieve(const pf_bank* bank, const pf_index* index, const pf_bank* targets,
                             size_t target_i, size_t k, size_t shortlist, pf_match* out, size_t* count);
/* Same search, rendered as one JSON line {"target", "matches": [...]}. */
PF_API pf_status pf_retrieve_json(const pf_bank* bank, const pf_index* index, const pf_bank* targets,
                                  size_t target_i, size_t k, size_t shortlist, char** json);
PF_API pf_status pf_similarity(const pf_bank* a, size_t i, const pf_bank* b, size_t j, double* score);

/* ---- images ---- */
PF_API pf_status pf_image_read(const char* png_path, pf_image** out);
PF_API pf_status pf_image_write(const pf_image* image, const char* png_path);
/* data: width * height * channels interleaved samples in [0, 1]. */
PF_API pf_status pf_image_create(size_t width, size_t height, size_t channels, const double* data,
                                 pf_image** out);
PF_API size_t pf_image_width(const pf_image* image);
PF_API size_t pf_image_height(const pf_image* image);
PF_API size_t pf_image_channels(const pf_image* image);
PF_API const double* pf_image_data(const pf_image* image);
PF_API pf_status pf_image_blur(const pf_image* image, size_t radius, pf_image** out);
PF_API pf_status pf_image_edge_map(const pf_image* image, pf_image** out);
PF_API void pf_image_free(pf_image* image);

/* ---- losses ---- */
typedef enum pf_color_reference { PF_COLOR_BLUR = 0, PF_COLOR_TARGET = 1 } pf_color_reference;

typedef struct pf_loss_report {
  double shape;
  double color;
  double ta;
  double gan;
} pf_loss_report;

PF_API pf_status pf_ta_loss(const pf_image* y, const pf_image* generated, const pf_image* color_map,
                            double lambda1, double lambda2, size_t bins, pf_color_reference reference,
                            pf_loss_report* out);
PF_API pf_status pf_gan_objective(double d_real, double d_fake, double* out);
PF_API pf_status pf_loss_report_json(const pf_loss_report* report, double lambda1, double lambda2,
                                     size_t bins, pf_color_reference reference, char** json);

/* ---- pipelines ---- */
/* Runs a composite manifest. Returns PF_ERR_PARTIAL_FAILURE when any job
 * failed; report_json (nullable) receives the run report either way. */
PF_API pf_status pf_run_composite(const char* manifest_path, size_t threads, char** report_json);

typedef enum pf_space { PF_SPACE_2D = 0, PF_SPACE_3D = 1 } pf_space;
typedef enum pf_stb_mode { PF_STB_NONE = 0, PF_STB_FROM_MCP = 1, PF_STB_FROM_PALM = 2 } pf_stb_mode;

typedef struct pf_eval_params {
  pf_space space;
  double pck_threshold; /* < 0 selects the default (5 px / 20 mm) */
  double t_min;         /* t_min and t_max < 0 select 0-30 px / 20-50 mm */
  double t_max;
  size_t steps;         /* default 100 */
  pf_stb_mode stb;      /* convert ground-truth roots before scoring */
} pf_eval_params;

PF_API void pf_eval_params_default(pf_eval_params* params);
PF_API pf_status pf_eval_files(const char* pred_path, const char* gt_path, const pf_eval_params* params,
                               char** report_json, char** curve_csv);

/* config_text: flat "key = value" lines; later lines override earlier ones.
 * On PF_ERR_DIVERGENCE_DETECTED the partial report is still returned. */
PF_API pf_status pf_train_toy(const char* config_text, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* POSEFUSE_H */
