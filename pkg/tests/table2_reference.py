"""Reference mean test accuracies under 5% label noise, by dataset, learner and B."""

B_VALUES = (4, 8, 12, 16, 20, 24, 28, 32)

TABLE2 = {
    "iris": {
        "dt_bagging": (0.9133, 0.9333, 0.9467, 0.9333, 0.9533, 0.9533, 0.9667, 0.9467),
        "kmeans_bagging": (0.9400, 0.9400, 0.9733, 0.9667, 0.9733, 0.9667, 0.9733, 0.9667),
        "qmeans_bagging": (0.9417, 0.9750, 0.9750, 0.9750, 0.9667, 0.9667, 0.9667, 0.9583),
    },
    "breast_cancer": {
        "dt_bagging": (0.8860, 0.9175, 0.9281, 0.9246, 0.9246, 0.9246, 0.9298, 0.9316),
        "kmeans_bagging": (0.9035, 0.9333, 0.9421, 0.9456, 0.9439, 0.9421, 0.9491, 0.9421),
        "qmeans_bagging": (0.9316, 0.9421, 0.9474, 0.9456, 0.9439, 0.9456, 0.9456, 0.9474),
    },
    "wine": {
        "dt_bagging": (0.9333, 0.9444, 0.9556, 0.9500, 0.9556, 0.9556, 0.9556, 0.9556),
        "kmeans_bagging": (0.9500, 0.9722, 0.9722, 0.9889, 0.9889, 0.9889, 0.9889, 0.9889),
        "qmeans_bagging": (0.9167, 0.9444, 0.9653, 0.9792, 0.9653, 0.9653, 0.9792, 0.9861),
    },
}

TOLERANCE = {"iris": 0.04, "wine": 0.04, "breast_cancer": 0.03}
REQUIRED_CELLS = 20
