/* cc demo.c -I../include ../../../target/debug/libminkorth_ffi.a -lm -lpthread -ldl */
#include <stdio.h>
#include "minkorth.h"

int main(void) {
    const double normals[] = {0, -1, -1, 1, 1, 1};
    MkGauge *g = NULL;
    if (mk_gauge_polytope_h(normals, 3, 2, &g) != MK_STATUS_OK) {
        fprintf(stderr, "%s\n", mk_last_error());
        return 1;
    }
    const double v[] = {1, 1}, x[] = {0, 1}, y[] = {1, 0};
    double value, lo, hi;
    mk_gauge_eval(g, v, 2, &value);
    mk_right_interval(g, x, y, 2, 0.0, &lo, &hi);
    printf("%g [%g, %g]\n", value, lo, hi);

    const double bad[] = {1, 1, 1};
    MkStatus s = mk_gauge_eval(g, bad, 3, &value);
    printf("%d %s\n", (int)s, mk_last_error());
    mk_gauge_free(g);
    return 0;
}
