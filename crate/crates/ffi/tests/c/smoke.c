#include <math.h>
#include <stdio.h>

#include "basketmit.h"

int main(void) {
    BmEstimate e;
    if (bm_estimate_eps(2, 0.0, 0.15, 6818, 0.9, &e) != BM_STATUS_OK) {
        return 1;
    }
    if (!(e.eps_max > 0.0 && e.eps_max <= 0.11)) {
        return 2;
    }
    if (bm_estimate_n(2, 0.0, 0.3, 0.05, NAN, &e) != BM_STATUS_ABORT) {
        return 3;
    }
    char msg[64];
    if (bm_last_error_message(msg, sizeof msg) == 0) {
        return 4;
    }
    printf("%s %s\n", bm_version(), msg);
    return 0;
}
