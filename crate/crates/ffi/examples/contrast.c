/* Build the k = 4 contrast monoid and check both sides of its metric.
 *
 *   cargo build -p stonework-ffi --release
 *   cc crates/ffi/examples/contrast.c -Icrates/ffi/include \
 *      target/release/libstonework_ffi.a -lpthread -ldl -lm -o contrast
 */
#include <stdio.h>

#include "stonework.h"

int main(void) {
    StwContrast *c = NULL;
    StwMonoid *m = NULL;
    StwMetric *d = NULL;
    if (stw_contrast_new(4, &c) != STW_STATUS_OK) {
        fprintf(stderr, "error: %s\n", stw_last_error());
        return 2;
    }
    stw_contrast_monoid(c, &m);
    stw_contrast_metric(c, &d);
    printf("elements: %zu\n", stw_monoid_size(m));

    bool left = false, right = false;
    char *witness = NULL;
    stw_check_nonexpansive(m, d, STW_SIDE_LEFT, &left, NULL);
    stw_check_nonexpansive(m, d, STW_SIDE_RIGHT, &right, &witness);
    printf("left nonexpansive: %s\n", left ? "yes" : "no");
    printf("right nonexpansive: %s\n", right ? "yes" : "no");
    if (witness) {
        printf("right witness: %s\n", witness);
        stw_string_free(witness);
    }

    stw_metric_free(d);
    stw_monoid_free(m);
    stw_contrast_free(c);
    return left && !right ? 0 : 1;
}
