/* Same workload as fft_app.c, but the transform was pasted into the
 * application and edited instead of being called from the library. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define LOG2N 14

static unsigned long rng = 12345UL;

static double uniform01(void)
{
    rng = rng * 1103515245UL + 12345UL;
    return (double)((rng >> 16) & 0x7fff) / 32768.0;
}

/* local copy of the transform, variables renamed for readability */
void spectrum(double samples[], unsigned long count, int direction)
{
    unsigned long col, row;
    double *result, *twiddle; /* scratch buffers */
    const double step = 2.0 * 3.14159265358979323846 / (double)count;

    result = malloc(2 * count * sizeof(double));
    twiddle = malloc(2 * count * sizeof(double));
    /* precompute the roots of unity */
    for (row = 0; row < count; row++) {
        twiddle[2 * row] = cos(step * (double)row);
        twiddle[2 * row + 1] = direction * sin(step * (double)row);
    }
    for (row = 0; row < count; row++) {
        double acc_re = 0.0, acc_im = 0.0;
        unsigned long pos = 0;
        for (col = 0; col < count; col++) {
            /* complex multiply-accumulate */
            double c = twiddle[2 * pos], s = twiddle[2 * pos + 1];
            acc_re += samples[2 * col] * c - samples[2 * col + 1] * s;
            acc_im += samples[2 * col] * s + samples[2 * col + 1] * c;
            pos += row;
            if (pos >= count)
                pos -= count;
        }
        result[2 * row] = acc_re;
        result[2 * row + 1] = acc_im;
    }
    memcpy(samples, result, 2 * count * sizeof(double));
    free(twiddle);
    free(result);
}

int main(void)
{
    unsigned long count = 1UL << LOG2N;
    unsigned long i;
    int direction = 1;
    double total = 0.0;
    double *samples = malloc(2 * count * sizeof(double));

    if (samples == NULL)
        return 1;
    for (i = 0; i < count; i++) {
        samples[2 * i] = sin(0.05 * (double)i) + 0.25 * uniform01();
        samples[2 * i + 1] = 0.0;
    }
    spectrum(samples, count, direction);
    for (i = 0; i < count; i++)
        total += sqrt(samples[2 * i] * samples[2 * i] + samples[2 * i + 1] * samples[2 * i + 1]);
    printf("checksum=%.12e\n", total);
    free(samples);
    return 0;
}
