package com.acme.epoxy;

import static org.junit.Assert.assertEquals;

import java.util.Arrays;

import org.junit.AfterClass;
import org.junit.Before;
import org.junit.BeforeClass;
import org.junit.Test;

public class DifferCorrectnessTest {
    private static long totalDiffMillis;
    private static long totalDiffOperations;
    private static long totalDiffs;

    private final DiffAdapter testAdapter = new DiffAdapter();
    private final DataObserver testObserver = new DataObserver();

    @BeforeClass
    public static void beforeClass() {
        totalDiffMillis = 0;
        totalDiffOperations = 0;
        totalDiffs = 0;
    }

    @AfterClass
    public static void afterClass() {
        long avgOperations = totalDiffs == 0 ? 0 : totalDiffOperations / totalDiffs;
        System.out.println("Average operations per diff: " + avgOperations);
    }

    @Before
    public void setUp() {
        testAdapter.registerAdapterDataObserver(testObserver);
    }

    @Test
    public void insertOne() {
        int ops = testAdapter.diff(Arrays.asList("a"), Arrays.asList("a", "b"));
        totalDiffs++;
        totalDiffOperations += ops;
        assertEquals(1, testObserver.getOperations());
    }
}
