package org.jfree.data.time;

import java.util.ArrayList;
import java.util.List;

public class TimeSeries extends Series implements Cloneable {

    protected List data;

    private int maximumItemCount;

    public TimeSeries(Comparable name) {
        super(name);
        this.data = new ArrayList();
        this.maximumItemCount = Integer.MAX_VALUE;
    }

    public int getItemCount() {
        return this.data.size();
    }

    public Object clone() throws CloneNotSupportedException {
        Object clone = createCopy(0, getItemCount() - 1);
        return clone;
    }

    public TimeSeries createCopy(int start, int end)
            throws CloneNotSupportedException {
        if (start < 0) {
            throw new IllegalArgumentException("Requires start >= 0.");
        }
        if (end < start) {
            throw new IllegalArgumentException("Requires start <= end.");
        }
        TimeSeries copy = (TimeSeries) super.clone();
        copy.data = new ArrayList();
        if (this.data.size() > 0) {
            for (int index = start; index <= end; index++) {
                TimeSeriesDataItem item = (TimeSeriesDataItem) this.data.get(index);
                TimeSeriesDataItem clone = (TimeSeriesDataItem) item.clone();
                copy.add(clone);
            }
        }
        return copy;
    }
}
