#include "nr_fft.h"

#include <math.h>
#include <stdlib.h>
#include <string.h>

void four1(double data[], unsigned long nn, int isign)
{
    unsigned long j, k;
    double *out, *tw;
    const double theta = 2.0 * 3.14159265358979323846 / (double)nn;

    out = malloc(2 * nn * sizeof(double));
    tw = malloc(2 * nn * sizeof(double));
    for (k = 0; k < nn; k++) {
        tw[2 * k] = cos(theta * (double)k);
        tw[2 * k + 1] = isign * sin(theta * (double)k);
    }
    for (k = 0; k < nn; k++) {
        double re = 0.0, im = 0.0;
        unsigned long idx = 0;
        for (j = 0; j < nn; j++) {
            double wr = tw[2 * idx], wi = tw[2 * idx + 1];
            re += data[2 * j] * wr - data[2 * j + 1] * wi;
            im += data[2 * j] * wi + data[2 * j + 1] * wr;
            idx += k;
            if (idx >= nn)
                idx -= nn;
        }
        out[2 * k] = re;
        out[2 * k + 1] = im;
    }
    memcpy(data, out, 2 * nn * sizeof(double));
    free(tw);
    free(out);
}
